#pragma once

// Deterministic word automata, and exact checks of a regular language against
// context-free ones.

#include <algorithm>
#include <deque>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "twsep/bottomup.hpp"
#include "twsep/detail/sections.hpp"
#include "twsep/error.hpp"
#include "twsep/grammar.hpp"

namespace twsep {

/// Total deterministic automaton over a finite set of letters. Tables may be
/// incomplete while building; check_total() enforces the invariant and every
/// operation below calls it.
class Dfa {
public:
	explicit Dfa(std::vector<std::string> alphabet) : alphabet_(std::move(alphabet)) {
		std::sort(alphabet_.begin(), alphabet_.end());
		if (std::adjacent_find(alphabet_.begin(), alphabet_.end()) != alphabet_.end())
			throw AlphabetError("duplicate letter in word alphabet");
		for (const auto& l : alphabet_)
			if (!detail::is_alnum_token(l)) throw AlphabetError("bad letter '" + l + "'");
	}

	State add_state(const std::string& name, bool accepting = false) {
		detail::check_state_name(name);
		if (find_state(name)) throw Error("duplicate state '" + name + "'");
		names_.push_back(name);
		accepting_.push_back(accepting);
		next_.emplace_back(alphabet_.size(), sink_state);
		return static_cast<State>(names_.size() - 1);
	}
	void set_initial(State q) { initial_ = check(q); }
	void set_accepting(State q, bool accepting = true) { accepting_[check(q)] = accepting; }
	void set_transition(State from, std::size_t letter, State to) { next_[check(from)].at(letter) = check(to); }
	void set_transition(State from, const std::string& letter, State to) { set_transition(from, letter_index(letter), to); }

	const std::vector<std::string>& alphabet() const { return alphabet_; }
	std::size_t num_states() const { return names_.size(); }
	State initial() const {
		if (!initial_) throw ShapeError("automaton has no initial state");
		return *initial_;
	}
	bool is_accepting(State q) const { return accepting_.at(q); }
	const std::string& state_name(State q) const { return names_.at(q); }
	std::optional<State> find_state(const std::string& name) const {
		auto it = std::find(names_.begin(), names_.end(), name);
		if (it == names_.end()) return std::nullopt;
		return static_cast<State>(it - names_.begin());
	}
	std::optional<std::size_t> find_letter(const std::string& l) const {
		auto it = std::lower_bound(alphabet_.begin(), alphabet_.end(), l);
		if (it == alphabet_.end() || *it != l) return std::nullopt;
		return static_cast<std::size_t>(it - alphabet_.begin());
	}
	std::size_t letter_index(const std::string& l) const {
		auto i = find_letter(l);
		if (!i) throw AlphabetError("letter '" + l + "' is not in the word alphabet");
		return *i;
	}
	State next(State q, std::size_t letter) const { return next_.at(q).at(letter); }

	void check_total() const {
		initial();
		for (State q = 0; q < num_states(); ++q)
			for (std::size_t l = 0; l < alphabet_.size(); ++l)
				if (next_[q][l] == sink_state)
					throw ShapeError("no transition from '" + names_[q] + "' on '" + alphabet_[l] + "'");
	}

private:
	State check(State q) const {
		if (q >= names_.size()) throw Error("state index out of range");
		return q;
	}

	std::vector<std::string> alphabet_;
	std::vector<std::string> names_;
	std::vector<bool> accepting_;
	std::vector<std::vector<State>> next_;
	std::optional<State> initial_;
};

inline bool dfa_run(const Dfa& k, const Word& w) {
	k.check_total();
	State q = k.initial();
	for (const auto& x : w) q = k.next(q, k.letter_index(x));
	return k.is_accepting(q);
}

inline Dfa dfa_product(const Dfa& a, const Dfa& b, BoolOp op) {
	if (a.alphabet() != b.alphabet()) throw AlphabetError("product of automata over different alphabets");
	a.check_total();
	b.check_total();
	Dfa out(a.alphabet());
	std::map<std::pair<State, State>, State> ids;
	std::deque<std::pair<State, State>> todo;
	auto id = [&](State x, State y) {
		auto [it, fresh] = ids.emplace(std::make_pair(x, y), static_cast<State>(ids.size()));
		if (fresh) {
			bool fx = a.is_accepting(x), fy = b.is_accepting(y);
			bool acc = op == BoolOp::conj ? fx && fy : op == BoolOp::disj ? fx || fy : fx && !fy;
			out.add_state(a.state_name(x) + "_" + b.state_name(y), acc);
			todo.emplace_back(x, y);
		}
		return it->second;
	};
	out.set_initial(id(a.initial(), b.initial()));
	while (!todo.empty()) {
		auto [x, y] = todo.front();
		todo.pop_front();
		State from = ids.at({x, y});
		for (std::size_t l = 0; l < a.alphabet().size(); ++l) out.set_transition(from, l, id(a.next(x, l), b.next(y, l)));
	}
	return out;
}

inline Dfa dfa_complement(const Dfa& k) {
	k.check_total();
	Dfa out = k;
	for (State q = 0; q < k.num_states(); ++q) out.set_accepting(q, !k.is_accepting(q));
	return out;
}

struct WordEmptiness {
	bool empty = true;
	std::optional<Word> witness;
};

/// Witness is the shortest accepted word, lexicographically least among those.
inline WordEmptiness dfa_is_empty(const Dfa& k) {
	k.check_total();
	std::vector<std::optional<Word>> word(k.num_states());
	std::deque<State> todo{k.initial()};
	word[k.initial()] = Word{};
	while (!todo.empty()) {
		State q = todo.front();
		todo.pop_front();
		if (k.is_accepting(q)) return {false, word[q]};
		for (std::size_t l = 0; l < k.alphabet().size(); ++l) {
			State r = k.next(q, l);
			if (word[r]) continue;
			word[r] = *word[q];
			word[r]->push_back(k.alphabet()[l]);
			todo.push_back(r);
		}
	}
	return {};
}

/// Accepts every word over `alphabet`.
inline Dfa dfa_universal(std::vector<std::string> alphabet) {
	Dfa k(std::move(alphabet));
	State q = k.add_state("all", true);
	k.set_initial(q);
	for (std::size_t l = 0; l < k.alphabet().size(); ++l) k.set_transition(q, l, q);
	return k;
}

/// Nonempty words whose first letter is `first`.
inline Dfa dfa_first_letter(std::vector<std::string> alphabet, const std::string& first) {
	Dfa k(std::move(alphabet));
	State init = k.add_state("init"), yes = k.add_state("yes", true), no = k.add_state("no");
	k.set_initial(init);
	auto f = k.letter_index(first);
	for (std::size_t l = 0; l < k.alphabet().size(); ++l) {
		k.set_transition(init, l, l == f ? yes : no);
		k.set_transition(yes, l, yes);
		k.set_transition(no, l, no);
	}
	return k;
}

/// Is L(G) ∩ L(K) empty? The grammar's terminals must be letters of K.
/// Nonterminals of the product grammar are triples (p, X, q): X derives a word
/// that takes K from p to q. The witness minimizes length, then lexicographic
/// order; both are preserved by concatenating per-triple optima.
inline WordEmptiness cfg_dfa_intersection_empty(const CnfGrammar& g, const Dfa& k) {
	k.check_total();
	for (const auto& t : g.terminals())
		if (!k.find_letter(t)) throw AlphabetError("terminal '" + t + "' is not in the automaton's alphabet");
	std::size_t nq = k.num_states(), nn = g.nonterminals().size();
	auto idx = [&](State p, std::size_t x, State q) { return (p * nn + x) * nq + q; };
	std::vector<std::optional<Word>> best(nq * nn * nq);
	auto better = [](const Word& a, const std::optional<Word>& b) {
		return !b || a.size() < b->size() || (a.size() == b->size() && a < *b);
	};
	for (const auto& r : g.leaf_rules()) {
		auto x = g.nonterminal_index(r.lhs);
		auto l = k.letter_index(r.terminal);
		for (State p = 0; p < nq; ++p) {
			auto& slot = best[idx(p, x, k.next(p, l))];
			if (better(Word{r.terminal}, slot)) slot = Word{r.terminal};
		}
	}
	struct Rule {
		std::size_t x, y, z;
	};
	std::vector<Rule> rules;
	for (const auto& r : g.binary_rules())
		rules.push_back({g.nonterminal_index(r.lhs), g.nonterminal_index(r.left), g.nonterminal_index(r.right)});
	for (bool changed = true; changed;) {
		changed = false;
		for (const auto& r : rules)
			for (State p = 0; p < nq; ++p)
				for (State m = 0; m < nq; ++m) {
					const auto& u = best[idx(p, r.y, m)];
					if (!u) continue;
					for (State q = 0; q < nq; ++q) {
						const auto& v = best[idx(m, r.z, q)];
						if (!v) continue;
						Word w = *u;
						w.insert(w.end(), v->begin(), v->end());
						auto& slot = best[idx(p, r.x, q)];
						if (better(w, slot)) {
							slot = std::move(w);
							changed = true;
						}
					}
				}
	}
	WordEmptiness out;
	auto s = g.nonterminal_index(g.start());
	for (State q = 0; q < nq; ++q) {
		const auto& w = best[idx(k.initial(), s, q)];
		if (k.is_accepting(q) && w && better(*w, out.witness)) out = {false, w};
	}
	return out;
}

struct SeparatorReport {
	bool separates = false;
	std::optional<Word> violation_g; ///< in L(G) but not in K
	std::optional<Word> violation_h; ///< in L(H) and in K
};

/// Does K contain L(G) and avoid L(H)?
inline SeparatorReport verify_separator(const Dfa& k, const CnfGrammar& g, const CnfGrammar& h) {
	auto eg = cfg_dfa_intersection_empty(g, dfa_complement(k));
	auto eh = cfg_dfa_intersection_empty(h, k);
	return {eg.empty && eh.empty, eg.witness, eh.witness};
}

// Text format:
//   alphabet: p q
//   states: s0 s1
//   initial: s0
//   accepting: s1
//   s0 p -> s1

inline std::string write_dfa(const Dfa& k) {
	std::ostringstream os;
	os << "alphabet: " << detail::join(k.alphabet(), " ") << "\nstates:";
	for (State q = 0; q < k.num_states(); ++q) os << ' ' << k.state_name(q);
	os << "\ninitial: " << k.state_name(k.initial()) << "\naccepting:";
	for (State q = 0; q < k.num_states(); ++q)
		if (k.is_accepting(q)) os << ' ' << k.state_name(q);
	os << "\n";
	for (State q = 0; q < k.num_states(); ++q)
		for (std::size_t l = 0; l < k.alphabet().size(); ++l)
			if (k.next(q, l) != sink_state)
				os << k.state_name(q) << ' ' << k.alphabet()[l] << " -> " << k.state_name(k.next(q, l)) << "\n";
	return os.str();
}

inline Dfa parse_dfa(std::string_view text) {
	auto sec = detail::read_sections(text, {"alphabet", "states", "initial", "accepting"});
	const auto& al = sec.require("alphabet");
	std::optional<Dfa> built;
	try {
		built.emplace(al.items);
	} catch (const AlphabetError& e) {
		throw ParseError(e.what(), al.line, 1);
	}
	Dfa& k = *built;
	const auto& states = sec.require("states");
	for (const auto& s : states.items) {
		if (!detail::is_name_token(s)) throw ParseError("bad state name '" + s + "'", states.line, 1);
		if (k.find_state(s)) throw ParseError("duplicate state '" + s + "'", states.line, 1);
		k.add_state(s);
	}
	auto lookup = [&](const std::string& s, std::size_t line, std::size_t col) {
		auto q = k.find_state(s);
		if (!q) throw ParseError("unknown state '" + s + "'", line, col);
		return *q;
	};
	const auto& init = sec.require("initial");
	if (init.items.size() != 1) throw ParseError("'initial:' takes one state", init.line, 1);
	k.set_initial(lookup(init.items[0], init.line, 1));
	for (const auto& s : sec.items("accepting")) k.set_accepting(lookup(s, sec.require("accepting").line, 1));
	std::set<std::pair<State, std::size_t>> seen;
	for (const auto& r : sec.rules) {
		auto lhs = detail::split_ws(r.lhs);
		if (lhs.size() != 2) throw ParseError("expected 'state letter -> state'", r.line, 1);
		State from = lookup(lhs[0], r.line, 1);
		auto l = k.find_letter(lhs[1]);
		if (!l) throw ParseError("letter '" + lhs[1] + "' is not in the alphabet", r.line, 1);
		if (!seen.emplace(from, *l).second) throw ParseError("duplicate transition", r.line, 1);
		k.set_transition(from, *l, lookup(std::string(r.rhs), r.line, r.rhs_column));
	}
	try {
		k.check_total();
	} catch (const ShapeError& e) {
		throw ParseError(e.what(), sec.rules.empty() ? states.line : sec.rules.back().line, 1);
	}
	return k;
}

} // namespace twsep
