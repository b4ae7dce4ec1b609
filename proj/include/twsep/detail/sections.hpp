#pragma once

// Shared reader for the line-oriented automaton formats: `key:` header lines
// whose values may continue on following lines, and rule lines containing `->`.

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "twsep/detail/text.hpp"
#include "twsep/error.hpp"

namespace twsep::detail {

struct HeaderValue {
	std::size_t line = 0;
	std::vector<std::string> items;
};

struct RuleLine {
	std::size_t line;
	std::string_view lhs;
	std::string_view rhs;
	std::size_t rhs_column;
};

struct SectionedText {
	std::map<std::string, HeaderValue> headers;
	std::vector<RuleLine> rules;

	bool has(const std::string& key) const { return headers.count(key) != 0; }

	const HeaderValue& require(const std::string& key) const {
		auto it = headers.find(key);
		if (it == headers.end()) throw ParseError("missing '" + key + ":' header", 1, 1);
		return it->second;
	}

	std::vector<std::string> items(const std::string& key) const {
		auto it = headers.find(key);
		return it == headers.end() ? std::vector<std::string>{} : it->second.items;
	}
};

/// Headers must precede rules. Header items are split on whitespace and commas.
inline SectionedText read_sections(std::string_view text, const std::vector<std::string>& known_headers) {
	SectionedText out;
	std::string current;
	for (const auto& ln : logical_lines(text)) {
		auto arrow = ln.text.find("->");
		if (arrow != std::string_view::npos) {
			current.clear();
			auto lhs = trim(ln.text.substr(0, arrow));
			auto rhs_raw = ln.text.substr(arrow + 2);
			auto rhs = trim(rhs_raw);
			auto lead = rhs_raw.find_first_not_of(" \t");
			auto col = arrow + 3 + (lead == std::string_view::npos ? 0 : lead);
			out.rules.push_back({ln.number, lhs, rhs, col});
			continue;
		}
		auto colon = ln.text.find(':');
		if (colon != std::string_view::npos) {
			std::string key(trim(ln.text.substr(0, colon)));
			bool known = false;
			for (const auto& k : known_headers) known = known || k == key;
			if (!known) throw ParseError("unknown header '" + key + ":'", ln.number, 1);
			if (!out.rules.empty()) throw ParseError("header '" + key + ":' after transitions", ln.number, 1);
			if (out.headers.count(key)) throw ParseError("duplicate header '" + key + ":'", ln.number, 1);
			auto& hv = out.headers[key];
			hv.line = ln.number;
			hv.items = split_ws(ln.text.substr(colon + 1), ",");
			current = key;
			continue;
		}
		if (current.empty()) throw ParseError("expected a header or a rule with '->'", ln.number, 1);
		auto more = split_ws(ln.text, ",");
		auto& items = out.headers[current].items;
		items.insert(items.end(), more.begin(), more.end());
	}
	return out;
}

/// Parses `letter` or `letter(x1,...,xn)` into its parts.
inline std::pair<std::string, std::vector<std::string>> read_application(std::string_view text, std::size_t line) {
	Cursor cur(text, line);
	auto head = cur.token();
	if (head.empty() || head == "*") cur.fail("expected a letter");
	std::vector<std::string> args;
	if (cur.consume('(')) {
		if (!cur.consume(')')) {
			do {
				auto a = cur.token();
				if (a.empty() || a == "*") cur.fail("expected a state name");
				args.push_back(a);
			} while (cur.consume(','));
			cur.expect(')');
		}
	}
	cur.skip_ws();
	if (!cur.eof()) cur.fail("unexpected text");
	return {head, args};
}

} // namespace twsep::detail
