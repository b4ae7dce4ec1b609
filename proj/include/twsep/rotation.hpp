#pragma once

// L-equivalence of terms, search for an associative binary term over {a, c},
// the word automaton read off a left comb, and the separator extraction
// pipeline from a tree-walking automaton.

#include <algorithm>
#include <atomic>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "twsep/bottomup.hpp"
#include "twsep/error.hpp"
#include "twsep/grammar.hpp"
#include "twsep/obfuscation.hpp"
#include "twsep/tree.hpp"
#include "twsep/walking.hpp"
#include "twsep/words.hpp"

namespace twsep {

/// eval_term of a term over every tuple of reachable states (the sink
/// included when it is reachable). Values are stored row-major, first port
/// most significant.
struct Transformation {
	std::vector<State> domain;
	unsigned arity = 0;
	std::vector<State> values;

	bool operator==(const Transformation&) const = default;

	State at(std::span<const State> args) const {
		std::size_t i = 0;
		for (auto s : args) {
			auto it = std::find(domain.begin(), domain.end(), s);
			if (it == domain.end()) throw Error("state outside the reachable domain");
			i = i * domain.size() + static_cast<std::size_t>(it - domain.begin());
		}
		return values.at(i);
	}
};

inline constexpr unsigned default_max_table_arity = 3;

inline Transformation transformation(const Dbta& a, const Term& t, unsigned max_arity = default_max_table_arity) {
	if (t.arity() > max_arity)
		throw ResourceError("transformation tables are limited to arity " + std::to_string(max_arity) + ", term has " +
		                    std::to_string(t.arity()) + " ports");
	Transformation out{reachable_states(a), static_cast<unsigned>(t.arity()), {}};
	std::size_t n = out.domain.size();
	std::size_t rows = 1;
	for (unsigned i = 0; i < out.arity; ++i) rows *= n;
	out.values.reserve(rows);
	StateTuple args(out.arity);
	for (std::size_t r = 0; r < rows; ++r) {
		for (std::size_t i = out.arity, x = r; i-- > 0; x /= n) args[i] = out.domain[x % n];
		out.values.push_back(eval_term(a, t, args));
	}
	return out;
}

/// On a minimized automaton, equal tables is the same as L-equivalence:
/// reachable states are realized by trees and distinct states are separated
/// by some context.
inline bool l_equivalent(const Dbta& amin, const Term& t, const Term& u, unsigned max_arity = default_max_table_arity) {
	if (t.arity() != u.arity()) throw ArityError("L-equivalence needs terms of equal arity");
	return transformation(amin, t, max_arity) == transformation(amin, u, max_arity);
}

/// t(t(x,y),z) and t(x,t(y,z)) have equal tables.
inline bool is_associative(const Dbta& amin, const Term& t) {
	if (t.arity() != 2) throw ArityError("associativity needs a binary term");
	// Tabulate t once; both ternary tables follow by composition.
	auto bin = transformation(amin, t, 2);
	const auto& dom = bin.domain;
	std::map<State, std::size_t> pos;
	for (std::size_t i = 0; i < dom.size(); ++i) pos[dom[i]] = i;
	auto apply = [&](State x, State y) { return bin.values[pos.at(x) * dom.size() + pos.at(y)]; };
	for (auto x : dom)
		for (auto y : dom)
			for (auto z : dom)
				if (apply(apply(x, y), z) != apply(x, apply(y, z))) return false;
	return true;
}

// ---------------------------------------------------------------------------
// t*

/// All bracketings with n ports: trees over a/2 and * with n leaves, sorted.
inline std::vector<Tree> bracketings(std::size_t n) {
	if (n == 0) throw SizeError("bracketings need at least one port");
	std::vector<std::vector<Tree>> by_ports{{}, {Tree::leaf(port_label)}};
	for (std::size_t k = 2; k <= n; ++k) {
		std::vector<Tree> layer;
		for (std::size_t i = 1; i < k; ++i)
			for (const auto& l : by_ports[i])
				for (const auto& r : by_ports[k - i]) layer.push_back(Tree(obf_inner, {l, r}));
		std::sort(layer.begin(), layer.end());
		by_ports.push_back(std::move(layer));
	}
	return by_ports[n];
}

/// Replaces every inner node of a bracketing by `t`.
inline Term instantiate(const Term& t, const Tree& bracketing) {
	if (bracketing.is_port()) return Term::port();
	if (bracketing.arity() != 2) throw ShapeError("a bracketing has binary inner nodes");
	return compose(t, {instantiate(t, bracketing.child(0)), instantiate(t, bracketing.child(1))});
}

/// Members of t* with n ports, smallest first, at most `budget` of them.
inline std::vector<Term> tstar_members(const Term& t, std::size_t n, std::size_t budget) {
	if (t.arity() != 2) throw ArityError("t* needs a binary term");
	std::set<Term> all;
	for (const auto& b : bracketings(n)) all.insert(instantiate(t, b));
	std::vector<Term> out(all.begin(), all.end());
	if (out.size() > budget) out.erase(out.begin() + static_cast<std::ptrdiff_t>(budget), out.end());
	return out;
}

/// Left rotations taking a bracketing to the left comb, as the list of
/// intermediate bracketings (first = input, last = comb).
inline std::vector<Tree> rotate_to_comb(const Tree& bracketing) {
	std::vector<Tree> steps{bracketing};
	for (;;) {
		// Leftmost-topmost node whose right child is inner.
		std::optional<NodePath> found;
		std::function<void(const Tree&, NodePath&)> find = [&](const Tree& s, NodePath& path) {
			if (found || s.is_leaf()) return;
			if (!s.child(1).is_leaf()) {
				found = path;
				return;
			}
			path.push_back(1);
			find(s.child(0), path);
			path.pop_back();
		};
		NodePath path;
		find(steps.back(), path);
		if (!found) return steps;
		steps.push_back(rotate_at(steps.back(), *found, Rotation::left));
	}
}

// ---------------------------------------------------------------------------
// Rotation search

struct RotationWitness {
	Term term;
	std::size_t found_at_size;
	std::string fingerprint; ///< of the minimized automaton it was checked against
};

struct RotationSearch {
	std::optional<RotationWitness> witness;
	std::size_t bound;
	std::size_t candidates; ///< terms checked
};

namespace detail {

inline void require_obf_letters(const RankedAlphabet& sigma) {
	if (sigma.arity(obf_inner) != 2u || sigma.arity(obf_pad) != 0u)
		throw AlphabetError("the alphabet needs the letters a/2 and c/0");
}

} // namespace detail

/// Minimizes `a`, then tries the binary terms over {a, c} in enumeration order
/// (size, then lexicographic) up to `max_size` nodes. Each size class is
/// checked by `threads` workers; the smallest passing term wins either way.
inline RotationSearch find_rotation_term(const Dbta& a, std::size_t max_size, unsigned threads = 1) {
	detail::require_obf_letters(a.alphabet());
	auto amin = minimize(a);
	auto fp = fingerprint(amin);
	auto terms = binary_ac_terms(max_size);
	RotationSearch out{std::nullopt, max_size, 0};
	for (std::size_t begin = 0; begin < terms.size();) {
		std::size_t size = terms[begin].tree().size(), end = begin;
		while (end < terms.size() && terms[end].tree().size() == size) ++end;
		std::vector<char> ok(end - begin, 0);
		std::atomic<std::size_t> next{begin};
		auto work = [&] {
			for (std::size_t i; (i = next++) < end;) ok[i - begin] = is_associative(amin, terms[i]);
		};
		unsigned workers = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(end - begin)));
		if (workers == 1) {
			work();
		} else {
			std::vector<std::thread> pool;
			for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
			for (auto& th : pool) th.join();
		}
		for (std::size_t i = begin; i < end; ++i) {
			++out.candidates;
			if (ok[i - begin]) {
				out.witness = RotationWitness{terms[i], size, fp};
				return out;
			}
		}
		begin = end;
	}
	return out;
}

// ---------------------------------------------------------------------------
// Word automaton of the combs

/// K with a₁…aₙ ∈ K iff comb(t, a₁…aₙ) ∈ L(a), for n ≥ 2. A special initial
/// state reads the first letter; a one-letter word σ is accepted iff σ ∈ L(a).
/// States are the initial state plus the states of `a` met from it (the sink
/// made explicit when met).
inline Dfa comb_dfa(const Dbta& a, const Term& t, const std::vector<std::string>& gamma) {
	detail::require_obf_letters(a.alphabet());
	if (t.arity() != 2) throw ArityError("comb_dfa needs a binary term");
	RankedAlphabet{{obf_inner, 2}, {obf_pad, 0}}.check(t.tree(), true);
	for (const auto& g : gamma) {
		if (a.alphabet().arity(g) != 0u) throw AlphabetError("letter '" + g + "' is not a leaf letter of the automaton");
		if (g == obf_pad) throw AlphabetError("'c' cannot be a word letter");
	}
	Dfa k(gamma);
	std::vector<State> leaf_state;
	for (const auto& g : k.alphabet()) leaf_state.push_back(a.step(a.alphabet().index_of(g), {}));

	std::string init_name = "init";
	while (a.find_state(init_name) || init_name == "sink") init_name += "_";
	State init = k.add_state(init_name);
	k.set_initial(init);
	std::map<State, State> ids; // a-state -> k-state
	std::vector<State> todo;
	auto id = [&](State q) {
		auto it = ids.find(q);
		if (it != ids.end()) return it->second;
		State s = k.add_state(a.state_name(q), a.is_accepting(q));
		ids.emplace(q, s);
		todo.push_back(q);
		return s;
	};
	for (std::size_t l = 0; l < k.alphabet().size(); ++l) k.set_transition(init, l, id(leaf_state[l]));
	while (!todo.empty()) {
		State q = todo.back();
		todo.pop_back();
		State from = ids.at(q);
		for (std::size_t l = 0; l < k.alphabet().size(); ++l)
			k.set_transition(from, l, id(eval_term(a, t, {q, leaf_state[l]})));
	}
	return k;
}

// ---------------------------------------------------------------------------
// Extraction pipeline

struct ExtractionReport {
	std::size_t behaviors = 0;        ///< states of to_dbta(W)
	std::size_t minimized_states = 0; ///< states after minimization
	RotationSearch search;
	std::optional<Dfa> separator; ///< absent when the search was exhausted
	SeparatorReport verification;

	bool exhausted() const { return !search.witness; }
	bool verified() const { return separator && verification.separates; }
};

/// to_dbta, minimize, rotation search, comb_dfa, then exact verification
/// against both grammars. The word alphabet is the union of the terminals.
inline ExtractionReport extract_separator(const Dtwa& w, const CnfGrammar& g, const CnfGrammar& h, std::size_t search_bound,
                                          unsigned threads = 1) {
	detail::require_obf_letters(w.alphabet());
	std::set<std::string> gamma_set(g.terminals().begin(), g.terminals().end());
	gamma_set.insert(h.terminals().begin(), h.terminals().end());
	std::vector<std::string> gamma(gamma_set.begin(), gamma_set.end());
	for (const auto& x : gamma)
		if (w.alphabet().arity(x) != 0u || x == obf_pad)
			throw AlphabetError("terminal '" + x + "' is not a leaf letter of the walking automaton");

	ExtractionReport out;
	auto a = to_dbta(w);
	out.behaviors = a.num_states();
	auto amin = minimize(a);
	out.minimized_states = amin.num_states();
	out.search = find_rotation_term(amin, search_bound, threads);
	if (out.exhausted()) return out;
	out.separator = comb_dfa(amin, out.search.witness->term, gamma);
	out.verification = verify_separator(*out.separator, g, h);
	return out;
}

} // namespace twsep
