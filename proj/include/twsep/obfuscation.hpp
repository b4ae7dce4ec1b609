#pragma once

// Obfuscation of a CNF grammar: every nonterminal node of a derivation is
// replaced by an arbitrary binary term over two fresh letters, a/2 and c/0.
// Leaves stay as they are, so the obfuscation of a single leaf σ is {σ}.

#include <map>
#include <set>
#include <string>

#include "twsep/bottomup.hpp"
#include "twsep/error.hpp"
#include "twsep/grammar.hpp"
#include "twsep/tree.hpp"

namespace twsep {

inline const std::string obf_inner = "a";
inline const std::string obf_pad = "c";

/// The grammar's terminals plus a/2 and c/0.
inline RankedAlphabet obf_alphabet(const CnfGrammar& g) {
	std::map<std::string, unsigned> m{{obf_inner, 2}, {obf_pad, 0}};
	for (const auto& t : g.terminals()) {
		if (t == obf_inner || t == obf_pad)
			throw AlphabetError("terminal '" + t + "' clashes with the obfuscation letters a and c");
		m[t] = 0;
	}
	return RankedAlphabet(m);
}

/// Binary terms over {a, c}, i.e. trees over {a/2, c/0} with two ports.
inline std::vector<Term> binary_ac_terms(std::size_t max_nodes) {
	return enumerate_terms(RankedAlphabet{{obf_inner, 2}, {obf_pad, 0}}, 2, max_nodes);
}

/// Direct enumeration of the obfuscations of one derivation, limited to
/// trees with at most `max_nodes` nodes.
inline std::set<Tree> kop_oracle(const Tree& derivation, std::size_t max_nodes) {
	std::set<Tree> out;
	if (derivation.is_leaf()) {
		if (max_nodes >= 1) out.insert(derivation);
		return out;
	}
	if (derivation.arity() != 2) throw ShapeError("derivation nodes must be binary");
	if (max_nodes < 3) return out;
	auto left = kop_oracle(derivation.child(0), max_nodes - 2);
	auto right = kop_oracle(derivation.child(1), max_nodes - 2);
	for (const auto& s : binary_ac_terms(max_nodes))
		for (const auto& l : left) {
			if (s.tree().size() - 2 + l.size() + 1 > max_nodes) break;
			for (const auto& r : right) {
				if (s.tree().size() - 2 + l.size() + r.size() > max_nodes) break;
				out.insert(compose(s, {Term(l), Term(r)}).to_tree());
			}
		}
	return out;
}

/// Nondeterministic automaton for the obfuscation of G. States:
///   C      a tree over {a, c} only,
///   Tl_X   a terminal leaf σ with X -> σ,
///   Tp_X   a Tl_X leaf wrapped in a-nodes with c-only siblings,
///   Tb_X   an obfuscated derivation from X with at least one inner node,
///          possibly wrapped the same way.
/// Tp_X is only usable as a child of a combination step: a derivation that is a
/// single leaf has no term around it. Accepting: Tl_S and Tb_S.
inline Nta kop_nta(const CnfGrammar& g) {
	auto sigma = obf_alphabet(g);
	Nta n(sigma);
	State c = n.add_state("C");
	std::map<std::string, State> tl, tp, tb;
	for (const auto& x : g.nonterminals()) {
		tl[x] = n.add_state("Tl_" + x, x == g.start());
		tp[x] = n.add_state("Tp_" + x);
		tb[x] = n.add_state("Tb_" + x, x == g.start());
	}
	auto a = sigma.index_of(obf_inner);
	n.add_transition(obf_pad, {}, c);
	n.add_transition(a, {c, c}, c);
	for (const auto& r : g.leaf_rules()) n.add_transition(r.terminal, {}, tl.at(r.lhs));
	for (const auto& x : g.nonterminals()) {
		for (State inner : {tl[x], tp[x]}) {
			n.add_transition(a, {inner, c}, tp[x]);
			n.add_transition(a, {c, inner}, tp[x]);
		}
		n.add_transition(a, {tb[x], c}, tb[x]);
		n.add_transition(a, {c, tb[x]}, tb[x]);
	}
	for (const auto& r : g.binary_rules())
		for (State y : {tl.at(r.left), tp.at(r.left), tb.at(r.left)})
			for (State z : {tl.at(r.right), tp.at(r.right), tb.at(r.right)}) n.add_transition(a, {y, z}, tb.at(r.lhs));
	return n;
}

/// Membership in the obfuscation of G, determinizing kop_nta(G) on demand.
/// Reuse one instance across queries to share the cache.
class KopRecognizer {
public:
	explicit KopRecognizer(const CnfGrammar& g) : lazy_(kop_nta(g)) {}

	bool contains(const Tree& s) const {
		lazy_.nta().alphabet().check(s);
		return lazy_.accepts(s);
	}
	const Nta& nta() const noexcept { return lazy_.nta(); }

private:
	LazyDeterminizer lazy_;
};

inline bool kop_member(const CnfGrammar& g, const Tree& s) { return KopRecognizer(g).contains(s); }

} // namespace twsep
