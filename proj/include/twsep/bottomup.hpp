#pragma once

// Bottom-up tree automata: deterministic (Dbta) and nondeterministic (Nta).
//
// Dbta transition tables may be partial. A missing entry leads to the virtual
// rejecting sink `sink_state`, which is absorbing: any tuple containing it
// evaluates to it. The sink is never stored and never counted as a state.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "twsep/detail/sections.hpp"
#include "twsep/error.hpp"
#include "twsep/tree.hpp"

namespace twsep {

using State = std::uint32_t;
using StateTuple = std::vector<State>;

inline constexpr State sink_state = std::numeric_limits<State>::max();

struct TupleLess {
	using is_transparent = void;
	bool operator()(std::span<const State> a, std::span<const State> b) const {
		return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
	}
};

namespace detail {

/// Calls fn(tuple) for every tuple in [0,total)^arity with at least one component
/// in [fresh_from,total). With fresh_from = 0 this is every tuple.
template <class Fn>
void for_each_new_tuple(std::size_t arity, std::size_t fresh_from, std::size_t total, Fn&& fn) {
	if (arity == 0) {
		if (fresh_from == 0) fn(StateTuple{});
		return;
	}
	if (fresh_from >= total) return;
	StateTuple tuple(arity);
	// The first fresh component sits at position j: earlier ones are old, later ones arbitrary.
	for (std::size_t j = 0; j < arity; ++j) {
		std::function<void(std::size_t)> rec = [&](std::size_t pos) {
			if (pos == arity) {
				fn(tuple);
				return;
			}
			std::size_t lo = 0, hi = total;
			if (pos < j) hi = fresh_from;
			if (pos == j) lo = fresh_from;
			for (std::size_t v = lo; v < hi; ++v) {
				tuple[pos] = static_cast<State>(v);
				rec(pos + 1);
			}
		};
		rec(0);
	}
}

inline void check_state_name(const std::string& name) {
	if (!is_name_token(name)) throw Error("state name '" + name + "' must match [A-Za-z0-9_]+");
}

} // namespace detail

class Dbta {
public:
	using Table = std::map<StateTuple, State, TupleLess>;

	explicit Dbta(RankedAlphabet alphabet) : alphabet_(std::move(alphabet)), tables_(alphabet_.size()) {}

	State add_state(std::string name, bool accepting = false) {
		detail::check_state_name(name);
		if (index_.count(name)) throw Error("duplicate state '" + name + "'");
		State q = static_cast<State>(names_.size());
		index_.emplace(name, q);
		names_.push_back(std::move(name));
		accepting_.push_back(accepting);
		return q;
	}

	void set_accepting(State q, bool accepting = true) { accepting_.at(q) = accepting; }

	/// Sets δ_letter(children) = target. Entries may not mention the sink.
	void set_transition(std::size_t letter, StateTuple children, State target) {
		if (letter >= alphabet_.size()) throw AlphabetError("letter index out of range");
		if (children.size() != alphabet_.arity_at(letter))
			throw ArityError("letter '" + alphabet_.letters()[letter] + "' has arity " +
			                 std::to_string(alphabet_.arity_at(letter)));
		for (auto q : children)
			if (q >= num_states()) throw Error("transition uses an undeclared state");
		if (target >= num_states()) throw Error("transition targets an undeclared state");
		tables_[letter][std::move(children)] = target;
	}

	void set_transition(std::string_view letter, StateTuple children, State target) {
		set_transition(alphabet_.index_of(letter), std::move(children), target);
	}

	const RankedAlphabet& alphabet() const noexcept { return alphabet_; }
	std::size_t num_states() const noexcept { return names_.size(); }
	bool is_accepting(State q) const { return q != sink_state && accepting_.at(q); }
	const std::string& state_name(State q) const {
		static const std::string sink_name = "sink";
		return q == sink_state ? sink_name : names_.at(q);
	}
	std::optional<State> find_state(const std::string& name) const {
		auto it = index_.find(name);
		if (it == index_.end()) return std::nullopt;
		return it->second;
	}
	const Table& table(std::size_t letter) const { return tables_.at(letter); }

	std::size_t num_transitions() const {
		std::size_t n = 0;
		for (const auto& t : tables_) n += t.size();
		return n;
	}

	State step(std::size_t letter, std::span<const State> children) const {
		for (auto q : children)
			if (q == sink_state) return sink_state;
		const auto& t = tables_[letter];
		auto it = t.find(children);
		return it == t.end() ? sink_state : it->second;
	}

	/// True when every tuple over declared states has an entry.
	bool is_total() const {
		for (std::size_t l = 0; l < alphabet_.size(); ++l) {
			std::size_t expect = 1;
			for (unsigned i = 0; i < alphabet_.arity_at(l); ++i) expect *= num_states();
			if (tables_[l].size() != expect) return false;
		}
		return true;
	}

private:
	RankedAlphabet alphabet_;
	std::vector<std::string> names_;
	std::vector<bool> accepting_;
	std::map<std::string, State> index_;
	std::vector<Table> tables_;
};

/// The state reached at the root. Throws AlphabetError on letters outside the alphabet.
inline State eval(const Dbta& a, const Tree& t) {
	auto li = a.alphabet().find(t.label());
	if (!li || a.alphabet().arity_at(*li) != t.arity())
		throw AlphabetError("letter '" + t.label() + "' with " + std::to_string(t.arity()) +
		                    " children is not in the alphabet");
	StateTuple kids;
	kids.reserve(t.arity());
	for (const auto& c : t.children()) kids.push_back(eval(a, c));
	return a.step(*li, kids);
}

inline bool accepts(const Dbta& a, const Tree& t) { return a.is_accepting(eval(a, t)); }

namespace detail {

inline State eval_term_rec(const Dbta& a, const Tree& t, std::span<const State> ports, std::size_t& next) {
	if (t.is_port()) return ports[next++];
	auto li = a.alphabet().find(t.label());
	if (!li || a.alphabet().arity_at(*li) != t.arity())
		throw AlphabetError("letter '" + t.label() + "' is not in the alphabet");
	StateTuple kids;
	kids.reserve(t.arity());
	for (const auto& c : t.children()) kids.push_back(eval_term_rec(a, c, ports, next));
	return a.step(*li, kids);
}

} // namespace detail

/// Value of `t` when its i-th port is a subtree already evaluated to port_states[i].
inline State eval_term(const Dbta& a, const Term& t, std::span<const State> port_states) {
	if (port_states.size() != t.arity())
		throw ArityError("term has " + std::to_string(t.arity()) + " ports but " + std::to_string(port_states.size()) +
		                 " states were given");
	std::size_t next = 0;
	return detail::eval_term_rec(a, t.tree(), port_states, next);
}

inline State eval_term(const Dbta& a, const Term& t, std::initializer_list<State> port_states) {
	return eval_term(a, t, std::span<const State>(port_states.begin(), port_states.size()));
}

/// States reached by some tree, ascending; sink_state last if some tree reaches it.
inline std::vector<State> reachable_states(const Dbta& a) {
	std::vector<State> order; // discovery order; sink allowed
	std::vector<bool> seen(a.num_states() + 1, false);
	auto slot = [&](State q) -> std::size_t { return q == sink_state ? a.num_states() : q; };
	auto visit = [&](State q) {
		if (!seen[slot(q)]) {
			seen[slot(q)] = true;
			order.push_back(q);
		}
	};
	const auto& sigma = a.alphabet();
	std::size_t done = 0;
	bool first = true;
	while (first || done < order.size()) {
		std::size_t from = first ? 0 : done;
		std::size_t total = order.size();
		for (std::size_t l = 0; l < sigma.size(); ++l) {
			auto ar = sigma.arity_at(l);
			if (ar == 0 && !first) continue;
			detail::for_each_new_tuple(ar, from, total, [&](const StateTuple& idx) {
				StateTuple tuple(idx.size());
				for (std::size_t i = 0; i < idx.size(); ++i) tuple[i] = order[idx[i]];
				visit(a.step(l, tuple));
			});
		}
		done = total;
		first = false;
	}
	std::vector<State> out;
	for (State q = 0; q < a.num_states(); ++q)
		if (seen[q]) out.push_back(q);
	if (seen[a.num_states()]) out.push_back(sink_state);
	return out;
}

/// Only the reachable part.
inline Dbta trim(const Dbta& a) {
	auto reach = reachable_states(a);
	Dbta out(a.alphabet());
	std::vector<State> remap(a.num_states(), sink_state);
	for (auto q : reach)
		if (q != sink_state) remap[q] = out.add_state(a.state_name(q), a.is_accepting(q));
	for (std::size_t l = 0; l < a.alphabet().size(); ++l)
		for (const auto& [tuple, target] : a.table(l)) {
			StateTuple mapped;
			bool ok = true;
			for (auto q : tuple) {
				ok = ok && remap[q] != sink_state;
				mapped.push_back(remap[q]);
			}
			if (ok) out.set_transition(l, std::move(mapped), remap[target]);
		}
	return out;
}

/// Moore-style refinement over single-letter contexts. The result has only
/// reachable states; states equivalent to the sink are dropped into the sink.
inline Dbta minimize(const Dbta& a) {
	const auto& sigma = a.alphabet();
	auto reach = reachable_states(a);
	// Universe: reachable explicit states plus the sink (always, as the absorbing reject class).
	std::vector<State> universe;
	for (auto q : reach)
		if (q != sink_state) universe.push_back(q);
	universe.push_back(sink_state);
	std::map<State, std::size_t> pos;
	for (std::size_t i = 0; i < universe.size(); ++i) pos[universe[i]] = i;

	std::vector<std::size_t> block(universe.size());
	for (std::size_t i = 0; i < universe.size(); ++i) block[i] = a.is_accepting(universe[i]) ? 1 : 0;
	std::size_t num_blocks = 0;
	{
		std::set<std::size_t> distinct(block.begin(), block.end());
		num_blocks = distinct.size();
	}

	for (;;) {
		std::map<std::vector<std::size_t>, std::size_t> ids;
		std::vector<std::size_t> next(universe.size());
		for (std::size_t u = 0; u < universe.size(); ++u) {
			std::vector<std::size_t> sig{block[u]};
			for (std::size_t l = 0; l < sigma.size(); ++l) {
				auto ar = sigma.arity_at(l);
				if (ar == 0) continue;
				for (unsigned p = 0; p < ar; ++p) {
					detail::for_each_new_tuple(ar - 1, 0, reach.size(), [&](const StateTuple& sib) {
						StateTuple tuple;
						tuple.reserve(ar);
						for (unsigned i = 0, k = 0; i < ar; ++i) tuple.push_back(i == p ? universe[u] : reach[sib[k++]]);
						sig.push_back(block[pos.at(a.step(l, tuple))]);
					});
				}
			}
			next[u] = ids.emplace(std::move(sig), ids.size()).first->second;
		}
		block = std::move(next);
		if (ids.size() == num_blocks) break;
		num_blocks = ids.size();
	}

	std::size_t sink_block = block.back();
	std::map<std::size_t, State> block_state;
	std::vector<State> rep; // representative per new state
	Dbta out(sigma);
	for (std::size_t u = 0; u + 1 < universe.size(); ++u) {
		if (block[u] == sink_block || block_state.count(block[u])) continue;
		block_state[block[u]] = out.add_state(a.state_name(universe[u]), a.is_accepting(universe[u]));
		rep.push_back(universe[u]);
	}
	for (std::size_t l = 0; l < sigma.size(); ++l) {
		detail::for_each_new_tuple(sigma.arity_at(l), 0, rep.size(), [&](const StateTuple& idx) {
			StateTuple tuple;
			for (auto i : idx) tuple.push_back(rep[i]);
			auto b = block[pos.at(a.step(l, tuple))];
			if (b != sink_block) out.set_transition(l, idx, block_state.at(b));
		});
	}
	return out;
}

enum class BoolOp { conj, disj, diff };

/// Synchronous product over reachable pairs. `diff` is A and not B.
inline Dbta product(const Dbta& a, const Dbta& b, BoolOp op) {
	if (!(a.alphabet() == b.alphabet()))
		throw AlphabetError("product needs equal alphabets: {" + a.alphabet().to_string() + "} vs {" +
		                    b.alphabet().to_string() + "}");
	const auto& sigma = a.alphabet();
	auto accept = [&](State x, State y) {
		bool fx = a.is_accepting(x), fy = b.is_accepting(y);
		switch (op) {
		case BoolOp::conj: return fx && fy;
		case BoolOp::disj: return fx || fy;
		case BoolOp::diff: return fx && !fy;
		}
		return false;
	};
	Dbta out(sigma);
	std::vector<std::pair<State, State>> pairs;
	std::map<std::pair<State, State>, State> index;
	auto intern = [&](State x, State y) -> State {
		if (x == sink_state && y == sink_state) return sink_state;
		auto [it, inserted] = index.emplace(std::make_pair(x, y), static_cast<State>(pairs.size()));
		if (inserted) {
			pairs.emplace_back(x, y);
			out.add_state("p" + std::to_string(it->second), accept(x, y));
		}
		return it->second;
	};
	std::vector<std::tuple<std::size_t, StateTuple, State>> pending;
	std::size_t done = 0;
	bool first = true;
	while (first || done < pairs.size()) {
		std::size_t from = first ? 0 : done, total = pairs.size();
		for (std::size_t l = 0; l < sigma.size(); ++l) {
			auto ar = sigma.arity_at(l);
			if (ar == 0 && !first) continue;
			detail::for_each_new_tuple(ar, from, total, [&](const StateTuple& idx) {
				StateTuple ta, tb;
				for (auto i : idx) {
					ta.push_back(pairs[i].first);
					tb.push_back(pairs[i].second);
				}
				State r = intern(a.step(l, ta), b.step(l, tb));
				if (r != sink_state) pending.emplace_back(l, idx, r);
			});
		}
		done = total;
		first = false;
	}
	for (auto& [l, idx, r] : pending) out.set_transition(l, std::move(idx), r);
	return out;
}

/// Complement: the sink is made explicit so that it can accept.
inline Dbta complement(const Dbta& a) {
	Dbta out(a.alphabet());
	for (State q = 0; q < a.num_states(); ++q) out.add_state(a.state_name(q), !a.is_accepting(q));
	std::string sink_name = "sink";
	while (a.find_state(sink_name)) sink_name += "_";
	State s = out.add_state(sink_name, true);
	auto n = a.num_states() + 1;
	for (std::size_t l = 0; l < a.alphabet().size(); ++l) {
		detail::for_each_new_tuple(a.alphabet().arity_at(l), 0, n, [&](const StateTuple& idx) {
			StateTuple tuple;
			for (auto i : idx) tuple.push_back(i == s ? sink_state : i);
			State r = a.step(l, tuple);
			out.set_transition(l, idx, r == sink_state ? s : r);
		});
	}
	return out;
}

struct Emptiness {
	bool empty;
	/// Smallest accepted tree (node count, then preorder-lexicographic) when nonempty.
	std::optional<Tree> witness;
};

/// Smallest tree evaluating to each state (node count, then preorder-lexicographic).
inline std::vector<std::optional<Tree>> smallest_trees(const Dbta& a) {
	std::vector<std::optional<Tree>> best(a.num_states());
	const auto& sigma = a.alphabet();
	for (bool changed = true; changed;) {
		changed = false;
		for (std::size_t l = 0; l < sigma.size(); ++l) {
			for (const auto& [tuple, target] : a.table(l)) {
				std::vector<Tree> kids;
				bool ready = true;
				for (auto q : tuple) {
					if (!best[q]) {
						ready = false;
						break;
					}
					kids.push_back(*best[q]);
				}
				if (!ready) continue;
				Tree cand(sigma.letters()[l], std::move(kids));
				if (!best[target] || cand < *best[target]) {
					best[target] = std::move(cand);
					changed = true;
				}
			}
		}
	}
	return best;
}

inline Emptiness is_empty(const Dbta& a) {
	auto best = smallest_trees(a);
	std::optional<Tree> witness;
	for (State q = 0; q < a.num_states(); ++q)
		if (a.is_accepting(q) && best[q] && (!witness || *best[q] < *witness)) witness = best[q];
	return {!witness.has_value(), witness};
}

// ---------------------------------------------------------------------------

class Nta {
public:
	using Relation = std::map<StateTuple, std::vector<State>, TupleLess>;

	explicit Nta(RankedAlphabet alphabet) : alphabet_(std::move(alphabet)), relations_(alphabet_.size()) {}

	State add_state(std::string name, bool accepting = false) {
		detail::check_state_name(name);
		if (index_.count(name)) throw Error("duplicate state '" + name + "'");
		State q = static_cast<State>(names_.size());
		index_.emplace(name, q);
		names_.push_back(std::move(name));
		accepting_.push_back(accepting);
		return q;
	}

	void set_accepting(State q, bool accepting = true) { accepting_.at(q) = accepting; }

	void add_transition(std::size_t letter, StateTuple children, State target) {
		if (letter >= alphabet_.size()) throw AlphabetError("letter index out of range");
		if (children.size() != alphabet_.arity_at(letter))
			throw ArityError("letter '" + alphabet_.letters()[letter] + "' has arity " +
			                 std::to_string(alphabet_.arity_at(letter)));
		for (auto q : children)
			if (q >= num_states()) throw Error("transition uses an undeclared state");
		if (target >= num_states()) throw Error("transition targets an undeclared state");
		auto& targets = relations_[letter][std::move(children)];
		auto it = std::lower_bound(targets.begin(), targets.end(), target);
		if (it == targets.end() || *it != target) targets.insert(it, target);
	}

	void add_transition(std::string_view letter, StateTuple children, State target) {
		add_transition(alphabet_.index_of(letter), std::move(children), target);
	}

	const RankedAlphabet& alphabet() const noexcept { return alphabet_; }
	std::size_t num_states() const noexcept { return names_.size(); }
	bool is_accepting(State q) const { return accepting_.at(q); }
	const std::string& state_name(State q) const { return names_.at(q); }
	std::optional<State> find_state(const std::string& name) const {
		auto it = index_.find(name);
		if (it == index_.end()) return std::nullopt;
		return it->second;
	}
	const Relation& relation(std::size_t letter) const { return relations_.at(letter); }

	/// Sorted set of targets over all tuples drawn from the given child state sets.
	std::vector<State> image(std::size_t letter, std::span<const std::vector<State>> child_sets) const {
		std::vector<State> out;
		for (const auto& [tuple, targets] : relations_[letter]) {
			bool fits = true;
			for (std::size_t i = 0; i < tuple.size() && fits; ++i)
				fits = std::binary_search(child_sets[i].begin(), child_sets[i].end(), tuple[i]);
			if (fits) out.insert(out.end(), targets.begin(), targets.end());
		}
		std::sort(out.begin(), out.end());
		out.erase(std::unique(out.begin(), out.end()), out.end());
		return out;
	}

	/// All states some run assigns to the root.
	std::vector<State> eval_set(const Tree& t) const {
		auto li = alphabet_.find(t.label());
		if (!li || alphabet_.arity_at(*li) != t.arity())
			throw AlphabetError("letter '" + t.label() + "' is not in the alphabet");
		std::vector<std::vector<State>> kids;
		for (const auto& c : t.children()) kids.push_back(eval_set(c));
		return image(*li, kids);
	}

	bool accepts(const Tree& t) const {
		for (auto q : eval_set(t))
			if (accepting_[q]) return true;
		return false;
	}

private:
	RankedAlphabet alphabet_;
	std::vector<std::string> names_;
	std::vector<bool> accepting_;
	std::map<std::string, State> index_;
	std::vector<Relation> relations_;
};

/// Subset construction over reachable nonempty subsets; ∅ is the sink.
inline Dbta determinize(const Nta& n) {
	const auto& sigma = n.alphabet();
	Dbta out(sigma);
	std::vector<std::vector<State>> subsets;
	std::map<std::vector<State>, State> index;
	auto intern = [&](std::vector<State> s) -> State {
		if (s.empty()) return sink_state;
		auto it = index.find(s);
		if (it != index.end()) return it->second;
		State id = static_cast<State>(subsets.size());
		bool acc = std::any_of(s.begin(), s.end(), [&](State q) { return n.is_accepting(q); });
		out.add_state("d" + std::to_string(id), acc);
		index.emplace(s, id);
		subsets.push_back(std::move(s));
		return id;
	};
	std::vector<std::tuple<std::size_t, StateTuple, State>> pending;
	std::size_t done = 0;
	bool first = true;
	while (first || done < subsets.size()) {
		std::size_t from = first ? 0 : done, total = subsets.size();
		for (std::size_t l = 0; l < sigma.size(); ++l) {
			auto ar = sigma.arity_at(l);
			if (ar == 0 && !first) continue;
			detail::for_each_new_tuple(ar, from, total, [&](const StateTuple& idx) {
				std::vector<std::vector<State>> sets;
				for (auto i : idx) sets.push_back(subsets[i]);
				State r = intern(n.image(l, sets));
				if (r != sink_state) pending.emplace_back(l, idx, r);
			});
		}
		done = total;
		first = false;
	}
	for (auto& [l, idx, r] : pending) out.set_transition(l, std::move(idx), r);
	return out;
}

/// On-demand subset construction: only subsets met while evaluating trees are
/// built, and every (letter, child subsets) step is cached. Safe to share between threads.
class LazyDeterminizer {
public:
	explicit LazyDeterminizer(Nta nta) : nta_(std::move(nta)) {}

	const Nta& nta() const noexcept { return nta_; }

	/// Subset id reached at the root; sink_state stands for ∅.
	State eval(const Tree& t) const {
		std::lock_guard lock(mutex_);
		return eval_locked(t);
	}

	bool accepts(const Tree& t) const {
		std::lock_guard lock(mutex_);
		State s = eval_locked(t);
		return s != sink_state && accepting_[s];
	}

	std::vector<State> subset(State id) const {
		std::lock_guard lock(mutex_);
		return subsets_.at(id);
	}

	std::size_t num_subsets() const {
		std::lock_guard lock(mutex_);
		return subsets_.size();
	}

private:
	State eval_locked(const Tree& t) const {
		const auto& sigma = nta_.alphabet();
		auto li = sigma.find(t.label());
		if (!li || sigma.arity_at(*li) != t.arity())
			throw AlphabetError("letter '" + t.label() + "' is not in the alphabet");
		StateTuple key{static_cast<State>(*li)};
		for (const auto& c : t.children()) {
			State s = eval_locked(c);
			if (s == sink_state) return sink_state;
			key.push_back(s);
		}
		if (auto it = steps_.find(key); it != steps_.end()) return it->second;
		std::vector<std::vector<State>> sets;
		for (std::size_t i = 1; i < key.size(); ++i) sets.push_back(subsets_[key[i]]);
		auto img = nta_.image(*li, sets);
		State r = sink_state;
		if (!img.empty()) {
			auto [it, inserted] = ids_.emplace(img, static_cast<State>(subsets_.size()));
			if (inserted) {
				accepting_.push_back(std::any_of(img.begin(), img.end(), [&](State q) { return nta_.is_accepting(q); }));
				subsets_.push_back(std::move(img));
			}
			r = it->second;
		}
		steps_.emplace(std::move(key), r);
		return r;
	}

	Nta nta_;
	mutable std::mutex mutex_;
	mutable std::vector<std::vector<State>> subsets_;
	mutable std::vector<bool> accepting_;
	mutable std::map<std::vector<State>, State> ids_;
	mutable std::map<StateTuple, State, TupleLess> steps_;
};

// ---------------------------------------------------------------------------
// Text format
//
//   alphabet: a/2 c/0 p/0
//   states: q0 q1
//   accepting: q1
//   a(q0,q1) -> q1
//   p -> q0
//
// An Nta writes `-> {q0,q1}` on the right-hand side.

namespace detail {

template <class Automaton>
void write_header(std::ostream& os, const Automaton& a) {
	os << "alphabet: " << a.alphabet().to_string() << "\n";
	os << "states:";
	for (State q = 0; q < a.num_states(); ++q) os << ' ' << a.state_name(q);
	os << "\naccepting:";
	for (State q = 0; q < a.num_states(); ++q)
		if (a.is_accepting(q)) os << ' ' << a.state_name(q);
	os << "\n";
}

template <class Automaton>
void write_lhs(std::ostream& os, const Automaton& a, std::size_t letter, const StateTuple& tuple) {
	os << a.alphabet().letters()[letter];
	if (tuple.empty()) return;
	os << '(';
	for (std::size_t i = 0; i < tuple.size(); ++i) os << (i ? "," : "") << a.state_name(tuple[i]);
	os << ')';
}

template <class Automaton>
Automaton read_header(const SectionedText& sec) {
	RankedAlphabet sigma;
	try {
		sigma = RankedAlphabet::parse(join(sec.require("alphabet").items, " "));
	} catch (const AlphabetError& e) {
		throw ParseError(e.what(), sec.require("alphabet").line, 1);
	}
	Automaton a(sigma);
	const auto& states = sec.require("states");
	for (const auto& s : states.items) {
		if (!is_name_token(s)) throw ParseError("bad state name '" + s + "'", states.line, 1);
		if (a.find_state(s)) throw ParseError("duplicate state '" + s + "'", states.line, 1);
		a.add_state(s);
	}
	if (sec.has("accepting")) {
		for (const auto& s : sec.items("accepting")) {
			auto q = a.find_state(s);
			if (!q) throw ParseError("unknown accepting state '" + s + "'", sec.require("accepting").line, 1);
			a.set_accepting(*q);
		}
	}
	return a;
}

template <class Automaton>
std::pair<std::size_t, StateTuple> read_lhs(const Automaton& a, const RuleLine& r) {
	auto [letter, args] = read_application(r.lhs, r.line);
	auto li = a.alphabet().find(letter);
	if (!li) throw ParseError("letter '" + letter + "' is not in the alphabet", r.line, 1);
	if (args.size() != a.alphabet().arity_at(*li))
		throw ParseError("letter '" + letter + "' has arity " + std::to_string(a.alphabet().arity_at(*li)), r.line, 1);
	StateTuple tuple;
	for (const auto& s : args) {
		auto q = a.find_state(s);
		if (!q) throw ParseError("unknown state '" + s + "'", r.line, 1);
		tuple.push_back(*q);
	}
	return {*li, tuple};
}

template <class Automaton>
State read_state(const Automaton& a, std::string_view name, const RuleLine& r) {
	auto q = a.find_state(std::string(trim(name)));
	if (!q) throw ParseError("unknown state '" + std::string(trim(name)) + "'", r.line, r.rhs_column);
	return *q;
}

} // namespace detail

inline std::string write_dbta(const Dbta& a) {
	std::ostringstream os;
	detail::write_header(os, a);
	for (std::size_t l = 0; l < a.alphabet().size(); ++l)
		for (const auto& [tuple, target] : a.table(l)) {
			detail::write_lhs(os, a, l, tuple);
			os << " -> " << a.state_name(target) << "\n";
		}
	return os.str();
}

inline Dbta parse_dbta(std::string_view text) {
	auto sec = detail::read_sections(text, {"alphabet", "states", "accepting"});
	auto a = detail::read_header<Dbta>(sec);
	std::set<std::pair<std::size_t, StateTuple>> seen;
	for (const auto& r : sec.rules) {
		auto [l, tuple] = detail::read_lhs(a, r);
		if (!seen.emplace(l, tuple).second) throw ParseError("duplicate transition", r.line, 1);
		a.set_transition(l, tuple, detail::read_state(a, r.rhs, r));
	}
	return a;
}

inline std::string write_nta(const Nta& n) {
	std::ostringstream os;
	detail::write_header(os, n);
	for (std::size_t l = 0; l < n.alphabet().size(); ++l)
		for (const auto& [tuple, targets] : n.relation(l)) {
			detail::write_lhs(os, n, l, tuple);
			os << " -> {";
			for (std::size_t i = 0; i < targets.size(); ++i) os << (i ? "," : "") << n.state_name(targets[i]);
			os << "}\n";
		}
	return os.str();
}

inline Nta parse_nta(std::string_view text) {
	auto sec = detail::read_sections(text, {"alphabet", "states", "accepting"});
	auto n = detail::read_header<Nta>(sec);
	for (const auto& r : sec.rules) {
		auto [l, tuple] = detail::read_lhs(n, r);
		std::string_view rhs = r.rhs;
		if (!rhs.empty() && rhs.front() == '{') {
			if (rhs.back() != '}') throw ParseError("expected '}'", r.line, r.rhs_column);
			rhs = rhs.substr(1, rhs.size() - 2);
			for (const auto& s : detail::split_ws(rhs, ",")) n.add_transition(l, tuple, detail::read_state(n, s, r));
		} else {
			n.add_transition(l, tuple, detail::read_state(n, rhs, r));
		}
	}
	return n;
}

/// Short stable digest of an automaton's text form.
inline std::string fingerprint(const Dbta& a) { return detail::fnv1a_hex(write_dbta(a)); }

} // namespace twsep
