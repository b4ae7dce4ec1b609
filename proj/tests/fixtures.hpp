#pragma once

// Hand-built automata used across the suites.

#include <random>

#include "twsep/bottomup.hpp"
#include "twsep/grammar.hpp"
#include "twsep/walking.hpp"
#include "twsep/words.hpp"

namespace twsep::testing {

inline RankedAlphabet apq() { return RankedAlphabet{{"a", 2}, {"p", 0}, {"q", 0}}; }
inline RankedAlphabet acpq() { return RankedAlphabet{{"a", 2}, {"c", 0}, {"p", 0}, {"q", 0}}; }

/// Single accepting state; every transition loops on it.
inline Dbta one_state(const RankedAlphabet& sigma) {
	Dbta a(sigma);
	a.add_state("q", true);
	for (std::size_t l = 0; l < sigma.size(); ++l) a.set_transition(l, StateTuple(sigma.arity_at(l), 0), 0);
	return a;
}

/// Even number of p-leaves; binary letters add parities, other leaves count 0.
inline Dbta p_parity(const RankedAlphabet& sigma) {
	Dbta a(sigma);
	a.add_state("even", true);
	a.add_state("odd");
	for (std::size_t l = 0; l < sigma.size(); ++l) {
		const auto& name = sigma.letters()[l];
		switch (sigma.arity_at(l)) {
		case 0:
			a.set_transition(l, {}, name == "p" ? 1 : 0);
			break;
		case 2:
			for (State x = 0; x < 2; ++x)
				for (State y = 0; y < 2; ++y) a.set_transition(l, {x, y}, x ^ y);
			break;
		default:
			throw Error("p_parity supports arities 0 and 2");
		}
	}
	return a;
}

/// Trees whose root has a leaf as its left child. States: leaf, node with a
/// leaf left child (accepting), node with an inner left child.
inline Dbta root_left_leaf(const RankedAlphabet& sigma) {
	Dbta a(sigma);
	a.add_state("leaf");
	a.add_state("ll", true);
	a.add_state("ln");
	for (std::size_t l = 0; l < sigma.size(); ++l) {
		if (sigma.arity_at(l) == 0) {
			a.set_transition(l, {}, 0);
			continue;
		}
		for (State x = 0; x < 3; ++x)
			for (State y = 0; y < 3; ++y) a.set_transition(l, {x, y}, x == 0 ? 1 : 2);
	}
	return a;
}

/// Depth of the leftmost non-c leaf is ≡ 0 mod `modulus`. States: "none" (no
/// such leaf yet) and d0..d{m-1}. Language over {a/2, c/0, p/0, q/0}.
inline Dbta leftmost_depth_mod(unsigned modulus) {
	auto sigma = acpq();
	Dbta a(sigma);
	State none = a.add_state("none");
	for (unsigned d = 0; d < modulus; ++d) a.add_state("d" + std::to_string(d), d == 0);
	auto deeper = [&](State s) -> State { return s == none ? none : 1 + (s - 1 + 1) % modulus; };
	a.set_transition("c", {}, none);
	a.set_transition("p", {}, 1);
	a.set_transition("q", {}, 1);
	for (State x = 0; x <= modulus; ++x)
		for (State y = 0; y <= modulus; ++y) a.set_transition("a", {x, y}, x != none ? deeper(x) : deeper(y));
	return a;
}

/// Random, possibly partial Dbta over `sigma` with `n` states.
inline Dbta random_dbta(std::mt19937& rng, const RankedAlphabet& sigma, std::size_t n, double fill = 0.9) {
	Dbta a(sigma);
	std::bernoulli_distribution coin(0.5), present(fill);
	std::uniform_int_distribution<State> pick(0, static_cast<State>(n - 1));
	for (std::size_t i = 0; i < n; ++i) a.add_state("s" + std::to_string(i), coin(rng));
	for (std::size_t l = 0; l < sigma.size(); ++l) {
		auto ar = sigma.arity_at(l);
		StateTuple t(ar, 0);
		std::function<void(std::size_t)> rec = [&](std::size_t i) {
			if (i == ar) {
				if (present(rng)) a.set_transition(l, t, pick(rng));
				return;
			}
			for (State q = 0; q < n; ++q) {
				t[i] = q;
				rec(i + 1);
			}
		};
		rec(0);
	}
	return a;
}

inline Nta random_nta(std::mt19937& rng, const RankedAlphabet& sigma, std::size_t n, double density = 0.3) {
	Nta a(sigma);
	std::bernoulli_distribution coin(0.5), present(density);
	for (std::size_t i = 0; i < n; ++i) a.add_state("n" + std::to_string(i), coin(rng));
	for (std::size_t l = 0; l < sigma.size(); ++l) {
		auto ar = sigma.arity_at(l);
		StateTuple t(ar, 0);
		std::function<void(std::size_t)> rec = [&](std::size_t i) {
			if (i == ar) {
				for (State q = 0; q < n; ++q)
					if (present(rng)) a.add_transition(l, t, q);
				return;
			}
			for (State q = 0; q < n; ++q) {
				t[i] = q;
				rec(i + 1);
			}
		};
		rec(0);
	}
	return a;
}

/// Random total Dfa with `n` states over `letters`.
inline Dfa random_dfa(std::mt19937& rng, const std::vector<std::string>& letters, std::size_t n) {
	Dfa k(letters);
	std::bernoulli_distribution coin(0.5);
	std::uniform_int_distribution<State> pick(0, static_cast<State>(n - 1));
	for (std::size_t i = 0; i < n; ++i) k.add_state("k" + std::to_string(i), coin(rng));
	k.set_initial(0);
	for (State q = 0; q < n; ++q)
		for (std::size_t l = 0; l < letters.size(); ++l) k.set_transition(q, l, pick(rng));
	return k;
}

/// Random CNF grammar over {p, q} with nonterminals S, X1.. X{n-1}.
inline CnfGrammar random_grammar(std::mt19937& rng, std::size_t n, std::size_t binary_rules) {
	std::vector<std::string> nts{"S"};
	for (std::size_t i = 1; i < n; ++i) nts.push_back("X" + std::to_string(i));
	std::uniform_int_distribution<std::size_t> pick(0, n - 1);
	std::bernoulli_distribution coin(0.4);
	std::vector<BinaryRule> b;
	std::vector<LeafRule> l;
	for (std::size_t i = 0; i < binary_rules; ++i) b.push_back({nts[pick(rng)], nts[pick(rng)], nts[pick(rng)]});
	for (const auto& x : nts)
		for (const char* t : {"p", "q"})
			if (coin(rng)) l.push_back({x, t});
	l.push_back({nts[pick(rng)], "p"});
	l.push_back({nts[pick(rng)], "q"});
	return CnfGrammar("S", b, l);
}

/// Random total Dtwa with `n` states.
inline Dtwa random_dtwa(std::mt19937& rng, const RankedAlphabet& sigma, std::size_t n) {
	Dtwa w(sigma);
	for (std::size_t i = 0; i < n; ++i) w.add_state("w" + std::to_string(i));
	w.set_initial(0);
	std::uniform_int_distribution<State> pick(0, static_cast<State>(n - 1));
	std::uniform_int_distribution<int> kind(0, 99);
	for (std::size_t l = 0; l < sigma.size(); ++l) {
		unsigned ar = sigma.arity_at(l);
		for (Tag t = 0; t < w.num_tags(); ++t)
			for (State q = 0; q < n; ++q) {
				int k = kind(rng);
				Action act = Action::rejecting();
				if (k < 12) act = Action::accepting();
				else if (k < 20) act = Action::rejecting();
				else if (k < 50 || (ar == 0 && k >= 60)) act = Action::to_parent(pick(rng));
				else if (k < 60) act = Action::stay(pick(rng));
				else act = Action::to_child(pick(rng), std::uniform_int_distribution<unsigned>(1, ar)(rng));
				w.set_action(l, t, q, act);
			}
	}
	return w;
}

/// Every action is (same state, stay).
inline Dtwa stay_loop(const RankedAlphabet& sigma) {
	Dtwa w(sigma);
	w.set_initial(w.add_state("s"));
	w.set_default(Action::stay(0));
	return w;
}

} // namespace twsep::testing
