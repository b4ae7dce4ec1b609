#pragma once

#include <cctype>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "twsep/error.hpp"

namespace twsep::detail {

inline bool is_alnum_token(std::string_view s) {
	if (s.empty()) return false;
	for (char ch : s)
		if (!std::isalnum(static_cast<unsigned char>(ch))) return false;
	return true;
}

/// State names additionally allow '_'.
inline bool is_name_token(std::string_view s) {
	if (s.empty()) return false;
	for (char ch : s)
		if (!std::isalnum(static_cast<unsigned char>(ch)) && ch != '_') return false;
	return true;
}

inline std::string_view trim(std::string_view s) {
	const auto ws = " \t\r\n\f\v";
	auto b = s.find_first_not_of(ws);
	if (b == std::string_view::npos) return {};
	auto e = s.find_last_not_of(ws);
	return s.substr(b, e - b + 1);
}

inline bool starts_with(std::string_view s, std::string_view prefix) {
	return s.substr(0, prefix.size()) == prefix;
}

/// Character cursor with line/column bookkeeping for recursive-descent parsers.
class Cursor {
public:
	explicit Cursor(std::string_view text, std::size_t line = 1, std::size_t column = 1)
		: text_(text), line_(line), column_(column) {}

	bool eof() const noexcept { return pos_ >= text_.size(); }
	char peek() const noexcept { return eof() ? '\0' : text_[pos_]; }
	std::size_t line() const noexcept { return line_; }
	std::size_t column() const noexcept { return column_; }

	void advance() {
		if (eof()) return;
		if (text_[pos_] == '\n') {
			++line_;
			column_ = 1;
		} else {
			++column_;
		}
		++pos_;
	}

	void skip_ws() {
		while (!eof() && std::isspace(static_cast<unsigned char>(peek()))) advance();
	}

	bool consume(char ch) {
		skip_ws();
		if (peek() != ch) return false;
		advance();
		return true;
	}

	void expect(char ch) {
		if (!consume(ch)) fail(std::string("expected '") + ch + "'");
	}

	/// Reads [A-Za-z0-9_]+ or a single '*'. Returns empty if neither is present.
	std::string token() {
		skip_ws();
		std::string out;
		if (peek() == '*') {
			advance();
			return "*";
		}
		while (!eof() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_')) {
			out.push_back(peek());
			advance();
		}
		return out;
	}

	[[noreturn]] void fail(const std::string& what) const {
		throw ParseError(what, line_, column_);
	}

private:
	std::string_view text_;
	std::size_t pos_ = 0;
	std::size_t line_;
	std::size_t column_;
};

/// One logical line of a line-oriented format, with '#' comments removed.
struct Line {
	std::size_t number;
	std::string_view text;
};

inline std::vector<Line> logical_lines(std::string_view text) {
	std::vector<Line> out;
	std::size_t number = 1;
	while (!text.empty()) {
		auto nl = text.find('\n');
		auto raw = text.substr(0, nl);
		auto hash = raw.find('#');
		if (hash != std::string_view::npos) raw = raw.substr(0, hash);
		raw = trim(raw);
		if (!raw.empty()) out.push_back({number, raw});
		if (nl == std::string_view::npos) break;
		text.remove_prefix(nl + 1);
		++number;
	}
	return out;
}

inline std::vector<std::string> split_ws(std::string_view s, std::string_view extra_separators = "") {
	std::vector<std::string> out;
	std::string cur;
	for (char ch : s) {
		if (std::isspace(static_cast<unsigned char>(ch)) || extra_separators.find(ch) != std::string_view::npos) {
			if (!cur.empty()) out.push_back(std::move(cur));
			cur.clear();
		} else {
			cur.push_back(ch);
		}
	}
	if (!cur.empty()) out.push_back(std::move(cur));
	return out;
}

inline std::string join(const std::vector<std::string>& parts, std::string_view sep) {
	std::string out;
	for (std::size_t i = 0; i < parts.size(); ++i) {
		if (i) out += sep;
		out += parts[i];
	}
	return out;
}

/// 64-bit FNV-1a, rendered as 16 hex digits. Stable across platforms.
inline std::string fnv1a_hex(std::string_view data) {
	std::uint64_t h = 0xcbf29ce484222325ull;
	for (unsigned char ch : data) {
		h ^= ch;
		h *= 0x100000001b3ull;
	}
	static constexpr char digits[] = "0123456789abcdef";
	std::string out(16, '0');
	for (int i = 15; i >= 0; --i) {
		out[static_cast<std::size_t>(i)] = digits[h & 0xf];
		h >>= 4;
	}
	return out;
}

} // namespace twsep::detail
