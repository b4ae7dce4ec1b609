#pragma once

// Context-free grammars in Chomsky normal form (no ε, no unit rules).
//
// Terminals play the role of arity-0 letters and nonterminals of binary
// letters, so derivations are ordinary trees: inner nodes carry nonterminals,
// leaves carry terminals, and the X -> σ step is folded into the leaf.

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "twsep/detail/text.hpp"
#include "twsep/error.hpp"
#include "twsep/tree.hpp"

namespace twsep {

struct BinaryRule {
	std::string lhs, left, right;
	auto operator<=>(const BinaryRule&) const = default;
};

struct LeafRule {
	std::string lhs, terminal;
	auto operator<=>(const LeafRule&) const = default;
};

class CnfGrammar {
public:
	/// Builds and normalizes: nonterminals that derive no word or are not
	/// reachable from `start` are dropped together with their rules and listed
	/// in removed(). Terminals keep every symbol mentioned by a leaf rule.
	CnfGrammar(std::string start, std::vector<BinaryRule> binary, std::vector<LeafRule> leaf)
	    : start_(std::move(start)) {
		std::set<std::string> nts{start_}, ts;
		for (const auto& r : binary) nts.insert({r.lhs, r.left, r.right});
		for (const auto& r : leaf) {
			nts.insert(r.lhs);
			ts.insert(r.terminal);
		}
		for (const auto& s : nts) check_symbol(s);
		for (const auto& s : ts) {
			check_symbol(s);
			if (nts.count(s)) throw AlphabetError("symbol '" + s + "' is used both as terminal and nonterminal");
		}
		terminals_.assign(ts.begin(), ts.end());

		std::set<std::string> productive;
		for (const auto& r : leaf) productive.insert(r.lhs);
		for (bool changed = true; changed;) {
			changed = false;
			for (const auto& r : binary)
				if (!productive.count(r.lhs) && productive.count(r.left) && productive.count(r.right))
					changed = productive.insert(r.lhs).second;
		}
		std::set<std::string> reachable;
		if (productive.count(start_)) {
			std::vector<std::string> todo{start_};
			reachable.insert(start_);
			while (!todo.empty()) {
				auto x = todo.back();
				todo.pop_back();
				for (const auto& r : binary) {
					if (r.lhs != x || !productive.count(r.left) || !productive.count(r.right)) continue;
					for (const auto& y : {r.left, r.right})
						if (reachable.insert(y).second) todo.push_back(y);
				}
			}
		}
		for (const auto& s : nts)
			if (!reachable.count(s) && s != start_) removed_.push_back(s);
		// The start symbol always stays, possibly without rules (empty language).
		reachable.insert(start_);
		nonterminals_.assign(reachable.begin(), reachable.end());

		auto keep = [&](const std::string& s) { return reachable.count(s) && productive.count(s); };
		std::set<BinaryRule> b;
		for (auto& r : binary)
			if (keep(r.lhs) && keep(r.left) && keep(r.right)) b.insert(r);
		std::set<LeafRule> l;
		for (auto& r : leaf)
			if (keep(r.lhs)) l.insert(r);
		binary_.assign(b.begin(), b.end());
		leaf_.assign(l.begin(), l.end());
		if (!productive.count(start_)) binary_.clear(), leaf_.clear();
	}

	const std::string& start() const { return start_; }
	const std::vector<std::string>& terminals() const { return terminals_; }
	const std::vector<std::string>& nonterminals() const { return nonterminals_; }
	const std::vector<BinaryRule>& binary_rules() const { return binary_; }
	const std::vector<LeafRule>& leaf_rules() const { return leaf_; }
	const std::vector<std::string>& removed() const { return removed_; }

	bool is_terminal(const std::string& s) const { return std::binary_search(terminals_.begin(), terminals_.end(), s); }
	bool is_nonterminal(const std::string& s) const {
		return std::binary_search(nonterminals_.begin(), nonterminals_.end(), s);
	}
	std::size_t nonterminal_index(const std::string& s) const {
		auto it = std::lower_bound(nonterminals_.begin(), nonterminals_.end(), s);
		if (it == nonterminals_.end() || *it != s) throw AlphabetError("'" + s + "' is not a nonterminal");
		return static_cast<std::size_t>(it - nonterminals_.begin());
	}

	bool has_leaf_rule(const std::string& lhs, const std::string& terminal) const {
		return std::binary_search(leaf_.begin(), leaf_.end(), LeafRule{lhs, terminal});
	}
	bool has_binary_rule(const std::string& lhs, const std::string& left, const std::string& right) const {
		return std::binary_search(binary_.begin(), binary_.end(), BinaryRule{lhs, left, right});
	}

	/// Terminals at arity 0 and nonterminals at arity 2.
	RankedAlphabet derivation_alphabet() const {
		std::map<std::string, unsigned> m;
		for (const auto& t : terminals_) m[t] = 0;
		for (const auto& n : nonterminals_) m[n] = 2;
		return RankedAlphabet(m);
	}

private:
	static void check_symbol(const std::string& s) {
		if (!detail::is_alnum_token(s)) throw AlphabetError("bad grammar symbol '" + s + "'");
	}

	std::string start_;
	std::vector<std::string> terminals_, nonterminals_, removed_;
	std::vector<BinaryRule> binary_;
	std::vector<LeafRule> leaf_;
};

// Text format: rules `X -> Y Z` or `X -> σ`, separated by newlines or `;`, with
// `|` for alternatives. `#` starts a comment. A leading `start: X` line picks
// the start symbol, otherwise it is the left side of the first rule. A single
// right-hand symbol is a terminal unless it has rules of its own, in which case
// the rule is a unit rule and rejected.

inline CnfGrammar parse_grammar(std::string_view text) {
	struct Raw {
		std::string lhs;
		std::vector<std::string> rhs;
		std::size_t line, column;
	};
	std::vector<Raw> raw;
	std::optional<std::string> start;
	for (const auto& ln : detail::logical_lines(text)) {
		std::size_t offset = 0;
		for (;;) {
			auto semi = ln.text.find(';', offset);
			auto piece = ln.text.substr(offset, semi == std::string_view::npos ? std::string_view::npos : semi - offset);
			std::size_t column = offset + 1;
			offset = semi + 1;
			if (!detail::trim(piece).empty()) {
				column += piece.find_first_not_of(" \t");
				piece = detail::trim(piece);
				auto arrow = piece.find("->");
				if (arrow == std::string_view::npos) {
					auto colon = piece.find(':');
					if (colon == std::string_view::npos || detail::trim(piece.substr(0, colon)) != "start")
						throw ParseError("expected a rule 'X -> Y Z' or 'X -> a'", ln.number, column);
					if (start || !raw.empty()) throw ParseError("'start:' must come first and only once", ln.number, column);
					auto items = detail::split_ws(piece.substr(colon + 1));
					if (items.size() != 1) throw ParseError("'start:' takes one symbol", ln.number, column);
					start = items[0];
				} else {
					auto lhs = detail::split_ws(piece.substr(0, arrow));
					if (lhs.size() != 1) throw ParseError("expected one symbol left of '->'", ln.number, column);
					std::string body(piece.substr(arrow + 2));
					std::size_t from = 0;
					for (;;) {
						auto bar = body.find('|', from);
						auto alt = detail::split_ws(std::string_view(body).substr(from, bar == std::string::npos ? std::string::npos : bar - from));
						if (alt.empty() || alt.size() > 2)
							throw ParseError("rule '" + std::string(piece) + "' is not in Chomsky normal form", ln.number, column);
						raw.push_back({lhs[0], alt, ln.number, column});
						if (bar == std::string::npos) break;
						from = bar + 1;
					}
				}
			}
			if (semi == std::string_view::npos) break;
		}
	}
	if (raw.empty()) throw ParseError("grammar has no rules", 1, 1);

	std::set<std::string> lhs_symbols;
	for (const auto& r : raw) lhs_symbols.insert(r.lhs);
	std::vector<BinaryRule> binary;
	std::vector<LeafRule> leaf;
	for (const auto& r : raw) {
		for (const auto& s : r.rhs)
			if (!detail::is_alnum_token(s) || !detail::is_alnum_token(r.lhs))
				throw ParseError("bad symbol in rule for '" + r.lhs + "'", r.line, r.column);
		if (r.rhs.size() == 2) {
			binary.push_back({r.lhs, r.rhs[0], r.rhs[1]});
		} else if (lhs_symbols.count(r.rhs[0])) {
			throw ParseError("unit rule '" + r.lhs + " -> " + r.rhs[0] + "' is not in Chomsky normal form", r.line, r.column);
		} else {
			leaf.push_back({r.lhs, r.rhs[0]});
		}
	}
	try {
		return CnfGrammar(start.value_or(raw.front().lhs), std::move(binary), std::move(leaf));
	} catch (const AlphabetError& e) {
		throw ParseError(e.what(), 1, 1);
	}
}

inline std::string write_grammar(const CnfGrammar& g) {
	std::ostringstream os;
	os << "start: " << g.start() << "\n";
	for (const auto& r : g.binary_rules()) os << r.lhs << " -> " << r.left << ' ' << r.right << "\n";
	for (const auto& r : g.leaf_rules()) os << r.lhs << " -> " << r.terminal << "\n";
	return os.str();
}

namespace detail {

inline void check_word(const CnfGrammar& g, const Word& w) {
	if (w.empty()) throw UnsupportedError("the empty word is outside Chomsky normal form");
	for (const auto& x : w)
		if (!g.is_terminal(x)) throw AlphabetError("'" + x + "' is not a terminal of the grammar");
}

/// table[i][len-1] = nonterminals deriving w[i..i+len).
inline std::vector<std::vector<std::set<std::string>>> cyk_table(const CnfGrammar& g, const Word& w) {
	std::size_t n = w.size();
	std::vector<std::vector<std::set<std::string>>> t(n, std::vector<std::set<std::string>>(n));
	for (std::size_t i = 0; i < n; ++i)
		for (const auto& r : g.leaf_rules())
			if (r.terminal == w[i]) t[i][0].insert(r.lhs);
	for (std::size_t len = 2; len <= n; ++len)
		for (std::size_t i = 0; i + len <= n; ++i)
			for (std::size_t k = 1; k < len; ++k)
				for (const auto& r : g.binary_rules())
					if (t[i][k - 1].count(r.left) && t[i + k][len - k - 1].count(r.right)) t[i][len - 1].insert(r.lhs);
	return t;
}

} // namespace detail

inline bool cyk_member(const CnfGrammar& g, const Word& w) {
	detail::check_word(g, w);
	return detail::cyk_table(g, w)[0][w.size() - 1].count(g.start()) != 0;
}

/// All derivation trees of `w`, sorted and without duplicates. Two derivations
/// differing only in which X -> σ rule produced a leaf give the same tree.
inline std::vector<Tree> derivations(const CnfGrammar& g, const Word& w) {
	detail::check_word(g, w);
	auto table = detail::cyk_table(g, w);
	std::map<std::tuple<std::string, std::size_t, std::size_t>, std::vector<Tree>> memo;
	std::function<const std::vector<Tree>&(const std::string&, std::size_t, std::size_t)> build =
	    [&](const std::string& x, std::size_t i, std::size_t len) -> const std::vector<Tree>& {
		auto key = std::make_tuple(x, i, len);
		if (auto it = memo.find(key); it != memo.end()) return it->second;
		std::set<Tree> out;
		if (len == 1) {
			out.insert(Tree::leaf(w[i]));
		} else {
			for (std::size_t k = 1; k < len; ++k)
				for (const auto& r : g.binary_rules()) {
					if (r.lhs != x || !table[i][k - 1].count(r.left) || !table[i + k][len - k - 1].count(r.right)) continue;
					const auto& ls = build(r.left, i, k);
					const auto& rs = build(r.right, i + k, len - k);
					for (const auto& l : ls)
						for (const auto& rr : rs) out.insert(Tree(x, {l, rr}));
				}
		}
		return memo[key] = std::vector<Tree>(out.begin(), out.end());
	};
	if (!table[0][w.size() - 1].count(g.start())) return {};
	return build(g.start(), 0, w.size());
}

/// Checks that `d` is a derivation of some word rooted at `root`
/// (the start symbol by default).
inline bool is_derivation(const CnfGrammar& g, const Tree& d, const std::optional<std::string>& root = std::nullopt) {
	// Returns the nonterminals that may label the position of `t`.
	std::function<bool(const Tree&, const std::string&)> ok = [&](const Tree& t, const std::string& x) {
		if (t.is_leaf()) return g.has_leaf_rule(x, t.label());
		if (t.arity() != 2 || t.label() != x) return false;
		for (const auto& r : g.binary_rules()) {
			if (r.lhs != x) continue;
			auto fits = [&](const Tree& c, const std::string& y) { return c.is_leaf() ? g.has_leaf_rule(y, c.label()) : c.label() == y && ok(c, y); };
			if (fits(t.child(0), r.left) && fits(t.child(1), r.right)) return true;
		}
		return false;
	};
	return ok(d, root.value_or(g.start()));
}

inline Word yield(const Tree& derivation) { return leaf_word(derivation); }

/// Every word of L(G) of length at most `max_len`, shortest first, then
/// lexicographic.
inline std::vector<Word> generate_words(const CnfGrammar& g, std::size_t max_len) {
	// by_len[len-1][X] = words of length len derived from X.
	std::vector<std::map<std::string, std::set<Word>>> by_len;
	for (std::size_t len = 1; len <= max_len; ++len) {
		std::map<std::string, std::set<Word>> layer;
		if (len == 1) {
			for (const auto& r : g.leaf_rules()) layer[r.lhs].insert(Word{r.terminal});
		} else {
			for (const auto& r : g.binary_rules())
				for (std::size_t k = 1; k < len; ++k) {
					auto li = by_len[k - 1].find(r.left);
					auto ri = by_len[len - k - 1].find(r.right);
					if (li == by_len[k - 1].end() || ri == by_len[len - k - 1].end()) continue;
					auto& dst = layer[r.lhs];
					for (const auto& u : li->second)
						for (const auto& v : ri->second) {
							Word w = u;
							w.insert(w.end(), v.begin(), v.end());
							dst.insert(std::move(w));
						}
				}
		}
		by_len.push_back(std::move(layer));
	}
	std::vector<Word> out;
	for (const auto& layer : by_len)
		if (auto it = layer.find(g.start()); it != layer.end()) out.insert(out.end(), it->second.begin(), it->second.end());
	return out;
}

/// Grammars used in examples, tests and the CLI data directory, all over {p, q}.
namespace grammars {

/// {pq}
inline CnfGrammar pq() { return parse_grammar("S -> A B; A -> p; B -> q"); }

/// { pⁿqⁿ : n ≥ 1 }
inline CnfGrammar pn_qn() { return parse_grammar("S -> A B | A T; T -> S B; A -> p; B -> q"); }

/// Words starting with p (including the one-letter word p).
inline CnfGrammar p_initial() { return parse_grammar("S -> P R | p; R -> P R | Q R | p | q; P -> p; Q -> q"); }

/// Words starting with q.
inline CnfGrammar q_initial() { return parse_grammar("S -> Q R | q; R -> P R | Q R | p | q; P -> p; Q -> q"); }

/// Palindromes of length at least 2. Every derivation has a terminal as the
/// right child of the root: S splits off the last letter, and Lp / Lq derive
/// the rest, which must be a palindrome-with-that-letter-first.
inline CnfGrammar palindromes() {
	return parse_grammar(
	    "S -> Lp P | Lq Q\n"
	    "Lp -> P M | p\n"
	    "Lq -> Q M | q\n"
	    "M -> P P | Q Q | P Mp | Q Mq | p | q\n"
	    "Mp -> M P\n"
	    "Mq -> M Q\n"
	    "P -> p\n"
	    "Q -> q\n");
}

/// Words of length at least 2 that are not palindromes. Every derivation has a
/// terminal as the left child of the root: S splits off the first letter.
/// Rp derives words that, preceded by p, give a non-palindrome: either the
/// word ends in q, or it is u p with p u a non-palindrome.
inline CnfGrammar non_palindromes() {
	return parse_grammar(
	    "S -> P Rp | Q Rq\n"
	    "Rp -> A Q | S P | q\n"
	    "Rq -> A P | S Q | p\n"
	    "A -> P A | Q A | p | q\n"
	    "P -> p\n"
	    "Q -> q\n");
}

} // namespace grammars

} // namespace twsep
