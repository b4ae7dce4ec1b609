#pragma once

// Deterministic tree-walking automata.
//
// The head sits on a node and sees its state, the node's label and the node's
// position tag: 0 for the root, i for an i-th child. Each step either accepts,
// rejects, or changes state and moves to the parent, stays, or enters a child.

#include <algorithm>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "twsep/bottomup.hpp"
#include "twsep/detail/sections.hpp"
#include "twsep/error.hpp"
#include "twsep/tree.hpp"
#include "twsep/words.hpp"

namespace twsep {

using Tag = unsigned;
inline constexpr Tag root_tag = 0;

enum class Move : std::uint8_t { parent, stay, child };

struct Action {
	enum Kind : std::uint8_t { accept, reject, go } kind = reject;
	State target = 0;
	Move move = Move::stay;
	unsigned child = 0; ///< 1-based, for Move::child

	static Action accepting() { return {accept}; }
	static Action rejecting() { return {reject}; }
	static Action to_parent(State q) { return {go, q, Move::parent}; }
	static Action stay(State q) { return {go, q, Move::stay}; }
	static Action to_child(State q, unsigned i) { return {go, q, Move::child, i}; }

	bool operator==(const Action&) const = default;
};

class Dtwa {
public:
	explicit Dtwa(RankedAlphabet alphabet) : alphabet_(std::move(alphabet)), table_(alphabet_.size()) {}

	State add_state(const std::string& name) {
		detail::check_state_name(name);
		if (find_state(name)) throw Error("duplicate state '" + name + "'");
		names_.push_back(name);
		for (auto& t : table_) t.resize(names_.size() * num_tags());
		return static_cast<State>(names_.size() - 1);
	}
	void set_initial(State q) { initial_ = check(q); }

	void set_action(std::size_t letter, Tag tag, State q, Action act) {
		if (letter >= alphabet_.size()) throw AlphabetError("letter index out of range");
		if (tag >= num_tags()) throw ArityError("position tag " + std::to_string(tag) + " exceeds the maximal arity");
		if (act.kind == Action::go) {
			check(act.target);
			if (act.move == Move::child && (act.child < 1 || act.child > alphabet_.arity_at(letter)))
				throw ArityError("letter '" + alphabet_.letters()[letter] + "' has no child " + std::to_string(act.child));
		}
		table_[letter][slot(tag, check(q))] = act;
	}
	void set_action(const std::string& letter, Tag tag, State q, Action act) { set_action(alphabet_.index_of(letter), tag, q, act); }

	/// Fills every unset entry.
	void set_default(Action act) {
		for (std::size_t l = 0; l < alphabet_.size(); ++l)
			for (Tag t = 0; t < num_tags(); ++t)
				for (State q = 0; q < num_states(); ++q)
					if (!table_[l][slot(t, q)]) set_action(l, t, q, act);
	}

	const RankedAlphabet& alphabet() const { return alphabet_; }
	std::size_t num_states() const { return names_.size(); }
	Tag num_tags() const { return alphabet_.maxarity() + 1; }
	State initial() const {
		if (!initial_) throw ShapeError("tree-walking automaton has no initial state");
		return *initial_;
	}
	const std::string& state_name(State q) const { return names_.at(q); }
	std::optional<State> find_state(const std::string& name) const {
		auto it = std::find(names_.begin(), names_.end(), name);
		if (it == names_.end()) return std::nullopt;
		return static_cast<State>(it - names_.begin());
	}

	const Action& action(std::size_t letter, Tag tag, State q) const {
		const auto& a = table_.at(letter).at(slot(tag, q));
		if (!a)
			throw ShapeError("no action for letter '" + alphabet_.letters()[letter] + "', tag " + std::to_string(tag) +
			                 ", state '" + names_[q] + "'");
		return *a;
	}
	bool has_action(std::size_t letter, Tag tag, State q) const { return table_.at(letter).at(slot(tag, q)).has_value(); }

	void check_total() const {
		initial();
		for (std::size_t l = 0; l < alphabet_.size(); ++l)
			for (Tag t = 0; t < num_tags(); ++t)
				for (State q = 0; q < num_states(); ++q) action(l, t, q);
	}

	bool operator==(const Dtwa&) const = default;

private:
	std::size_t slot(Tag tag, State q) const { return q * num_tags() + tag; }
	State check(State q) const {
		if (q >= names_.size()) throw Error("state index out of range");
		return q;
	}

	RankedAlphabet alphabet_;
	std::vector<std::string> names_;
	std::optional<State> initial_;
	// Per letter, indexed by state * num_tags() + tag.
	std::vector<std::vector<std::optional<Action>>> table_;
};

// ---------------------------------------------------------------------------
// Runs

enum class Outcome : std::uint8_t { accept, reject, loop, escape };

inline const char* to_string(Outcome o) {
	switch (o) {
	case Outcome::accept: return "accept";
	case Outcome::reject: return "reject";
	case Outcome::loop: return "loop";
	case Outcome::escape: return "escape";
	}
	return "?";
}

struct RunOutcome {
	Outcome outcome;
	std::size_t steps; ///< moves made, counting a final move that repeats a configuration or leaves the tree
};

/// One line per configuration visited: `state @ path (tag)`.
using Trace = std::vector<std::string>;

inline RunOutcome run(const Dtwa& w, const Tree& s, Trace* trace = nullptr) {
	w.alphabet().check(s);
	TreeIndex index(s);
	std::vector<std::size_t> letter(index.size());
	for (std::size_t i = 0; i < index.size(); ++i) letter[i] = w.alphabet().index_of(index[i].tree->label());
	std::vector<bool> seen(index.size() * w.num_states(), false);
	State q = w.initial();
	std::size_t node = 0, steps = 0;
	for (;;) {
		const auto& n = index[node];
		if (trace) {
			std::string tag = n.child_number == 0 ? "root" : std::to_string(n.child_number);
			trace->push_back(w.state_name(q) + " @ " + to_string(index.path(node)) + " (" + tag + ")");
		}
		auto key = node * w.num_states() + q;
		if (seen[key]) return {Outcome::loop, steps};
		seen[key] = true;
		const auto& act = w.action(letter[node], static_cast<Tag>(n.child_number), q);
		if (act.kind == Action::accept) return {Outcome::accept, steps};
		if (act.kind == Action::reject) return {Outcome::reject, steps};
		++steps;
		q = act.target;
		if (act.move == Move::parent) {
			if (n.parent == TreeIndex::npos) return {Outcome::escape, steps};
			node = n.parent;
		} else if (act.move == Move::child) {
			node = n.children.at(act.child - 1);
		}
	}
}

inline bool accepts(const Dtwa& w, const Tree& s) { return run(w, s).outcome == Outcome::accept; }

// ---------------------------------------------------------------------------
// Depth-first traversal of a word automaton

/// Walks the tree depth-first, left to right, feeding the letters of Γ (the
/// word automaton's alphabet) to K at the leaves; other leaves are skipped.
/// States: down_k (entering a subtree) and up<i>_k (returning from child i).
inline Dtwa dfs_from_dfa(const Dfa& k, const RankedAlphabet& sigma) {
	k.check_total();
	for (const auto& l : k.alphabet())
		if (sigma.arity(l) != 0u) throw AlphabetError("letter '" + l + "' is not a leaf letter of the tree alphabet");
	Dtwa w(sigma);
	unsigned m = sigma.maxarity();
	auto nk = static_cast<State>(k.num_states());
	for (State x = 0; x < nk; ++x) w.add_state("down_" + k.state_name(x));
	for (unsigned i = 1; i <= m; ++i)
		for (State x = 0; x < nk; ++x) w.add_state("up" + std::to_string(i) + "_" + k.state_name(x));
	auto down = [&](State x) { return x; };
	auto up = [&](unsigned i, State x) { return i * nk + x; };
	w.set_initial(down(k.initial()));

	for (std::size_t l = 0; l < sigma.size(); ++l) {
		unsigned ar = sigma.arity_at(l);
		auto consumed = k.find_letter(sigma.letters()[l]);
		for (Tag tag = 0; tag <= m; ++tag)
			for (State x = 0; x < nk; ++x) {
				// Leave the subtree at this node with K in state y.
				auto finish = [&](State y) {
					if (tag == root_tag) return k.is_accepting(y) ? Action::accepting() : Action::rejecting();
					return Action::to_parent(up(tag, y));
				};
				if (ar == 0) w.set_action(l, tag, down(x), finish(consumed ? k.next(x, *consumed) : x));
				else w.set_action(l, tag, down(x), Action::to_child(down(x), 1));
				for (unsigned i = 1; i <= m; ++i) {
					Action act = Action::rejecting();
					if (i < ar) act = Action::to_child(down(x), i + 1);
					else if (i == ar) act = finish(x);
					w.set_action(l, tag, up(i, x), act);
				}
			}
	}
	return w;
}

// ---------------------------------------------------------------------------
// Behaviors and the conversion to a bottom-up automaton

struct LocalOutcome {
	enum Kind : std::uint8_t { accept, reject, loop, exit_up } kind = reject;
	State state = 0; ///< for exit_up
	auto operator<=>(const LocalOutcome&) const = default;
};

/// What happens when the head enters a subtree's root in a given state, the
/// subtree sitting at a given position tag: the run ends inside (accept,
/// reject, loop) or leaves through the root's parent move in some state.
class Behavior {
public:
	Behavior(Tag tags, std::size_t states) : states_(states), table_(tags * states) {}

	const LocalOutcome& at(Tag tag, State q) const { return table_.at(tag * states_ + q); }
	LocalOutcome& at(Tag tag, State q) { return table_.at(tag * states_ + q); }
	Tag num_tags() const { return static_cast<Tag>(table_.size() / states_); }

	auto operator<=>(const Behavior&) const = default;

private:
	std::size_t states_;
	std::vector<LocalOutcome> table_;
};

namespace detail {

/// Simulates the head at a node whose children have the given behaviors.
inline LocalOutcome local_run(const Dtwa& w, std::size_t letter, Tag tag, State q, std::span<const Behavior> children) {
	std::vector<bool> seen(w.num_states(), false);
	for (;;) {
		if (seen[q]) return {LocalOutcome::loop};
		seen[q] = true;
		const auto& act = w.action(letter, tag, q);
		if (act.kind == Action::accept) return {LocalOutcome::accept};
		if (act.kind == Action::reject) return {LocalOutcome::reject};
		switch (act.move) {
		case Move::parent: return {LocalOutcome::exit_up, act.target};
		case Move::stay: q = act.target; break;
		case Move::child: {
			auto r = children[act.child - 1].at(act.child, act.target);
			if (r.kind != LocalOutcome::exit_up) return r;
			q = r.state;
			break;
		}
		}
	}
}

} // namespace detail

inline Behavior behavior_compose(const Dtwa& w, std::size_t letter, std::span<const Behavior> children) {
	if (children.size() != w.alphabet().arity_at(letter))
		throw ArityError("letter '" + w.alphabet().letters()[letter] + "' needs " +
		                 std::to_string(w.alphabet().arity_at(letter)) + " child behaviors");
	Behavior b(w.num_tags(), w.num_states());
	for (Tag t = 0; t < w.num_tags(); ++t)
		for (State q = 0; q < w.num_states(); ++q) b.at(t, q) = detail::local_run(w, letter, t, q, children);
	return b;
}

inline Behavior behavior_of_leaf(const Dtwa& w, std::size_t letter) { return behavior_compose(w, letter, {}); }

inline Behavior behavior_of(const Dtwa& w, const Tree& s) {
	std::vector<Behavior> kids;
	for (const auto& c : s.children()) kids.push_back(behavior_of(w, c));
	return behavior_compose(w, w.alphabet().index_of(s.label()), kids);
}

/// Bottom-up automaton over the reachable behaviors. A tree is accepted iff its
/// behavior at the root tag, entered in the initial state, accepts.
inline Dbta to_dbta(const Dtwa& w) {
	w.check_total();
	const auto& sigma = w.alphabet();
	Dbta out(sigma);
	std::vector<Behavior> found;
	std::map<Behavior, State> ids;
	auto intern = [&](Behavior b) {
		auto it = ids.find(b);
		if (it != ids.end()) return it->second;
		State id = out.add_state("b" + std::to_string(found.size()), b.at(root_tag, w.initial()).kind == LocalOutcome::accept);
		ids.emplace(b, id);
		found.push_back(std::move(b));
		return id;
	};
	std::size_t done = 0;
	for (bool first = true; first || done < found.size(); first = false) {
		std::size_t fresh_from = done, total = found.size();
		done = total;
		for (std::size_t l = 0; l < sigma.size(); ++l) {
			auto ar = sigma.arity_at(l);
			if (ar == 0) {
				if (first) out.set_transition(l, {}, intern(behavior_of_leaf(w, l)));
				continue;
			}
			detail::for_each_new_tuple(ar, fresh_from, total, [&](const StateTuple& tuple) {
				std::vector<Behavior> kids;
				for (auto s : tuple) kids.push_back(found[s]);
				State target = intern(behavior_compose(w, l, kids));
				out.set_transition(l, tuple, target);
			});
		}
	}
	return out;
}

// ---------------------------------------------------------------------------
// Text format:
//   alphabet: a/2 c/0 p/0
//   states: q0 q1
//   initial: q0
//   default: reject
//   a[root] q0 -> q1 child 1
//   p[1] q1 -> q0 parent
//   c[2] q1 -> accept
// Every (letter, tag, state) must have an action once `default:` is applied.

inline std::string write_dtwa(const Dtwa& w) {
	std::ostringstream os;
	os << "alphabet: " << w.alphabet().to_string() << "\nstates:";
	for (State q = 0; q < w.num_states(); ++q) os << ' ' << w.state_name(q);
	os << "\ninitial: " << w.state_name(w.initial()) << "\ndefault: reject\n";
	for (std::size_t l = 0; l < w.alphabet().size(); ++l)
		for (Tag t = 0; t < w.num_tags(); ++t)
			for (State q = 0; q < w.num_states(); ++q) {
				const auto& a = w.action(l, t, q);
				if (a.kind == Action::reject) continue;
				os << w.alphabet().letters()[l] << '[' << (t == root_tag ? std::string("root") : std::to_string(t)) << "] "
				   << w.state_name(q) << " -> ";
				if (a.kind == Action::accept) {
					os << "accept\n";
					continue;
				}
				os << w.state_name(a.target) << ' ';
				switch (a.move) {
				case Move::parent: os << "parent"; break;
				case Move::stay: os << "stay"; break;
				case Move::child: os << "child " << a.child; break;
				}
				os << "\n";
			}
	return os.str();
}

inline Dtwa parse_dtwa(std::string_view text) {
	auto sec = detail::read_sections(text, {"alphabet", "states", "initial", "default"});
	RankedAlphabet sigma;
	try {
		sigma = RankedAlphabet::parse(detail::join(sec.require("alphabet").items, " "));
	} catch (const AlphabetError& e) {
		throw ParseError(e.what(), sec.require("alphabet").line, 1);
	}
	Dtwa w(sigma);
	const auto& states = sec.require("states");
	for (const auto& s : states.items) {
		if (!detail::is_name_token(s)) throw ParseError("bad state name '" + s + "'", states.line, 1);
		if (w.find_state(s)) throw ParseError("duplicate state '" + s + "'", states.line, 1);
		w.add_state(s);
	}
	auto lookup = [&](const std::string& s, std::size_t line, std::size_t col) {
		auto q = w.find_state(s);
		if (!q) throw ParseError("unknown state '" + s + "'", line, col);
		return *q;
	};
	const auto& init = sec.require("initial");
	if (init.items.size() != 1) throw ParseError("'initial:' takes one state", init.line, 1);
	w.set_initial(lookup(init.items[0], init.line, 1));

	for (const auto& r : sec.rules) {
		auto lhs = detail::split_ws(r.lhs);
		auto open = lhs.empty() ? std::string::npos : lhs[0].find('[');
		if (lhs.size() != 2 || open == std::string::npos || lhs[0].back() != ']')
			throw ParseError("expected 'letter[tag] state -> action'", r.line, 1);
		auto letter = lhs[0].substr(0, open);
		auto tag_text = lhs[0].substr(open + 1, lhs[0].size() - open - 2);
		auto li = sigma.find(letter);
		if (!li) throw ParseError("letter '" + letter + "' is not in the alphabet", r.line, 1);
		Tag tag = 0;
		if (tag_text != "root") {
			if (tag_text.empty() || !std::all_of(tag_text.begin(), tag_text.end(), ::isdigit) || tag_text.size() > 4)
				throw ParseError("bad position tag '" + tag_text + "'", r.line, 1);
			tag = static_cast<Tag>(std::stoul(tag_text));
			if (tag == 0 || tag >= w.num_tags()) throw ParseError("position tag " + tag_text + " out of range", r.line, 1);
		}
		State q = lookup(lhs[1], r.line, 1);
		if (w.has_action(*li, tag, q)) throw ParseError("duplicate transition", r.line, 1);

		auto rhs = detail::split_ws(r.rhs);
		Action act;
		if (rhs.size() == 1 && rhs[0] == "accept") act = Action::accepting();
		else if (rhs.size() == 1 && rhs[0] == "reject") act = Action::rejecting();
		else if (rhs.size() == 2 && rhs[1] == "parent") act = Action::to_parent(lookup(rhs[0], r.line, r.rhs_column));
		else if (rhs.size() == 2 && rhs[1] == "stay") act = Action::stay(lookup(rhs[0], r.line, r.rhs_column));
		else if (rhs.size() == 3 && rhs[1] == "child" && rhs[2].size() <= 4 &&
		         std::all_of(rhs[2].begin(), rhs[2].end(), ::isdigit))
			act = Action::to_child(lookup(rhs[0], r.line, r.rhs_column), static_cast<unsigned>(std::stoul(rhs[2])));
		else
			throw ParseError("expected accept, reject, or 'state parent|stay|child i'", r.line, r.rhs_column);
		try {
			w.set_action(*li, tag, q, act);
		} catch (const ArityError& e) {
			throw ParseError(e.what(), r.line, r.rhs_column);
		}
	}
	if (sec.has("default")) {
		const auto& d = sec.require("default");
		if (d.items.size() != 1 || (d.items[0] != "accept" && d.items[0] != "reject"))
			throw ParseError("'default:' is accept or reject", d.line, 1);
		w.set_default(d.items[0] == "accept" ? Action::accepting() : Action::rejecting());
	}
	try {
		w.check_total();
	} catch (const ShapeError& e) {
		throw ParseError(e.what(), sec.rules.empty() ? states.line : sec.rules.back().line, 1);
	}
	return w;
}

} // namespace twsep
