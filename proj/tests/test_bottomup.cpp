#include <catch_amalgamated.hpp>

#include <map>
#include <random>

#include "fixtures.hpp"
#include "support.hpp"
#include "twsep/bottomup.hpp"

using namespace twsep;
using namespace twsep::testing;

namespace {

Tree tree(std::string_view s) { return parse_tree(s); }

std::size_t count_p(const Tree& t) {
	auto w = leaf_word(t);
	return static_cast<std::size_t>(std::count(w.begin(), w.end(), "p"));
}

/// Table-filling distinguishability, recording for each marked pair a concrete
/// unary context that separates it. Pairs are over reachable states plus sink.
struct Distinguisher {
	const Dbta& a;
	std::vector<State> reach;
	std::vector<std::optional<Tree>> reps;
	std::map<std::pair<State, State>, Term> ctx;

	explicit Distinguisher(const Dbta& automaton) : a(automaton), reach(reachable_states(automaton)), reps(smallest_trees(automaton)) {
		std::vector<State> all = reach;
		if (std::find(all.begin(), all.end(), sink_state) == all.end()) all.push_back(sink_state);
		for (auto p : all)
			for (auto q : all)
				if (a.is_accepting(p) != a.is_accepting(q)) ctx.emplace(std::make_pair(p, q), Term::port());
		const auto& sigma = a.alphabet();
		for (bool changed = true; changed;) {
			changed = false;
			for (auto p : all)
				for (auto q : all) {
					if (p == q || ctx.count({p, q})) continue;
					for (std::size_t l = 0; l < sigma.size() && !ctx.count({p, q}); ++l) {
						auto ar = sigma.arity_at(l);
						for (unsigned pos = 0; pos < ar && !ctx.count({p, q}); ++pos) {
							detail::for_each_new_tuple(ar - 1, 0, reach.size(), [&](const StateTuple& sib) {
								if (ctx.count({p, q})) return;
								StateTuple tp, tq;
								std::vector<Tree> kids;
								for (unsigned i = 0, k = 0; i < ar; ++i) {
									if (i == pos) {
										tp.push_back(p);
										tq.push_back(q);
										kids.push_back(Tree::leaf(port_label));
									} else {
										State s = reach[sib[k++]];
										tp.push_back(s);
										tq.push_back(s);
										kids.push_back(representative(s));
									}
								}
								auto it = ctx.find({a.step(l, tp), a.step(l, tq)});
								if (it == ctx.end()) return;
								Term local(Tree(sigma.letters()[l], kids));
								ctx.emplace(std::make_pair(p, q), compose(it->second, {local}));
								changed = true;
							});
						}
					}
				}
		}
	}

	Tree representative(State s) const {
		if (s != sink_state) return *reps.at(s);
		// One step above representatives of reachable states that falls into the sink.
		const auto& sigma = a.alphabet();
		std::optional<Tree> found;
		for (std::size_t l = 0; l < sigma.size() && !found; ++l) {
			auto ar = sigma.arity_at(l);
			detail::for_each_new_tuple(ar, 0, reach.size(), [&](const StateTuple& idx) {
				if (found) return;
				StateTuple states;
				std::vector<Tree> kids;
				for (auto i : idx) {
					if (reach[i] == sink_state) return;
					states.push_back(reach[i]);
					kids.push_back(*reps.at(reach[i]));
				}
				if (a.step(l, states) == sink_state) found = Tree(sigma.letters()[l], kids);
			});
		}
		if (!found) throw Error("sink not realized");
		return *found;
	}

	bool distinguishable(State p, State q) const { return ctx.count({p, q}) != 0; }
};

} // namespace

TEST_CASE("eval on the one-state automaton") {
	auto a = one_state(apq());
	for (const auto& t : enumerate_trees(apq(), 7)) CHECK(eval(a, t) == 0);
}

TEST_CASE("eval on the p-parity automaton") {
	auto a = p_parity(apq());
	CHECK(eval(a, tree("a(p,a(q,p))")) == *a.find_state("even"));
	CHECK(eval(a, tree("a(p,a(q,q))")) == *a.find_state("odd"));
	// Membership oracle: count p leaves directly.
	for (const auto& t : enumerate_trees(apq(), 7)) CHECK(accepts(a, t) == (count_p(t) % 2 == 0));
	CHECK_THROWS_AS(eval(a, tree("b(p)")), AlphabetError);
	CHECK_THROWS_AS(eval(a, tree("a(p,c)")), AlphabetError);
}

TEST_CASE("eval_term") {
	auto a = p_parity(apq());
	CHECK(eval_term(a, Term::port(), {1}) == 1);
	auto t = parse_term("a(p,q)");
	CHECK(eval_term(a, t, std::span<const State>{}) == eval(a, t.tree()));
	CHECK_THROWS_AS(eval_term(a, parse_term("a(*,*)"), {0}), ArityError);

	// Substitution oracle on random automata and terms.
	std::mt19937 rng(1);
	auto sigma = acpq();
	std::vector<Term> terms;
	for (std::size_t n = 0; n <= 3; ++n) {
		auto ts = enumerate_terms(sigma, n, 7);
		terms.insert(terms.end(), ts.begin(), ts.end());
	}
	auto trees = enumerate_trees(sigma, 3);
	for (int rep = 0; rep < 20; ++rep) {
		auto d = random_dbta(rng, sigma, 3, 0.8);
		for (int i = 0; i < 50; ++i) {
			const auto& term = terms[rng() % terms.size()];
			std::vector<Term> args;
			StateTuple states;
			for (std::size_t k = 0; k < term.arity(); ++k) {
				const auto& s = trees[rng() % trees.size()];
				args.emplace_back(s);
				states.push_back(eval(d, s));
			}
			auto composed = compose(term, args).to_tree();
			CHECK(eval_term(d, term, states) == eval(d, composed));
		}
	}
}

TEST_CASE("determinize") {
	auto sigma = apq();
	SECTION("deterministic relation gives an isomorphic reachable part") {
		auto d = p_parity(sigma);
		Nta n(sigma);
		n.add_state("even", true);
		n.add_state("odd");
		for (std::size_t l = 0; l < sigma.size(); ++l)
			for (const auto& [tuple, target] : d.table(l)) n.add_transition(l, tuple, target);
		auto det = determinize(n);
		CHECK(det.num_states() == 2);
		CHECK(det.num_transitions() == d.num_transitions());
		for (const auto& t : enumerate_trees(sigma, 7)) CHECK(accepts(det, t) == accepts(d, t));
	}
	SECTION("an empty relation acts as the sink") {
		Nta n(sigma);
		n.add_state("x", true);
		n.add_transition("p", {}, 0);
		n.add_transition("a", {0, 0}, 0);
		auto det = determinize(n);
		CHECK(det.num_states() == 1);
		CHECK(eval(det, tree("a(p,q)")) == sink_state);
		CHECK(accepts(det, tree("a(p,p)")));
	}
	SECTION("language preserved for random 3-state automata") {
		std::mt19937 rng(2);
		auto trees = enumerate_trees(sigma, 7);
		for (int rep = 0; rep < 30; ++rep) {
			auto n = random_nta(rng, sigma, 3);
			auto det = determinize(n);
			for (const auto& t : trees) CHECK(accepts(det, t) == n.accepts(t));
		}
	}
}

TEST_CASE("LazyDeterminizer agrees with the full subset construction") {
	std::mt19937 rng(3);
	auto sigma = acpq();
	auto trees = enumerate_trees(sigma, 7);
	for (int rep = 0; rep < 10; ++rep) {
		auto n = random_nta(rng, sigma, 3, 0.25);
		auto det = determinize(n);
		LazyDeterminizer lazy(n);
		for (const auto& t : trees) CHECK(lazy.accepts(t) == accepts(det, t));
		CHECK(lazy.num_subsets() <= det.num_states());
	}
}

TEST_CASE("minimize") {
	auto sigma = apq();
	SECTION("already minimal") {
		auto a = p_parity(sigma);
		CHECK(minimize(a).num_states() == 2);
		CHECK(minimize(one_state(sigma)).num_states() == 1);
	}
	SECTION("duplicated states are merged") {
		// even/odd parity with a second copy of "odd" reached from the left.
		Dbta a(sigma);
		a.add_state("even", true);
		a.add_state("odd");
		a.add_state("odd2");
		auto parity = [](State s) { return s == 0 ? 0u : 1u; };
		a.set_transition("p", {}, 1);
		a.set_transition("q", {}, 0);
		for (State x = 0; x < 3; ++x)
			for (State y = 0; y < 3; ++y) {
				auto v = parity(x) ^ parity(y);
				a.set_transition("a", {x, y}, v == 0 ? 0 : (x == 0 ? 2 : 1));
			}
		auto m = minimize(a);
		CHECK(m.num_states() == 2);
		for (const auto& t : enumerate_trees(sigma, 7)) CHECK(accepts(m, t) == accepts(a, t));
	}
	SECTION("states equivalent to the sink are dropped") {
		Dbta a(sigma);
		a.add_state("ok", true);
		a.add_state("dead");
		a.set_transition("p", {}, 0);
		a.set_transition("q", {}, 1);
		a.set_transition("a", {0, 0}, 0);
		a.set_transition("a", {1, 1}, 1);
		auto m = minimize(a);
		CHECK(m.num_states() == 1);
		CHECK(eval(m, tree("q")) == sink_state);
	}
	SECTION("random automata: language, size, distinguishability") {
		std::mt19937 rng(4);
		auto trees = enumerate_trees(acpq(), 7);
		for (int rep = 0; rep < 60; ++rep) {
			auto a = random_dbta(rng, acpq(), 1 + rep % 6, 0.85);
			auto m = minimize(a);
			CHECK(m.num_states() <= a.num_states());
			for (const auto& t : trees) REQUIRE(accepts(m, t) == accepts(a, t));

			// Oracle 1: class count from table-filling on the input.
			Distinguisher din(a);
			std::vector<State> classes;
			for (auto q : din.reach) {
				bool fresh = true;
				for (auto c : classes) fresh = fresh && din.distinguishable(q, c);
				if (fresh && din.distinguishable(q, sink_state)) classes.push_back(q);
			}
			CHECK(m.num_states() == classes.size());

			// Oracle 2: every pair of distinct result states has a concrete separating context.
			Distinguisher dout(m);
			for (State p = 0; p < m.num_states(); ++p)
				for (State q = 0; q < m.num_states(); ++q) {
					if (p == q) continue;
					REQUIRE(dout.distinguishable(p, q));
					const Term& c = dout.ctx.at({p, q});
					auto sp = compose(c, {Term(dout.representative(p))}).to_tree();
					auto sq = compose(c, {Term(dout.representative(q))}).to_tree();
					CHECK(accepts(m, sp) != accepts(m, sq));
				}
		}
	}
	SECTION("determinize then minimize is idempotent") {
		std::mt19937 rng(5);
		for (int rep = 0; rep < 20; ++rep) {
			auto m = minimize(determinize(random_nta(rng, apq(), 3)));
			CHECK(write_dbta(minimize(m)) == write_dbta(m));
		}
	}
}

TEST_CASE("product, complement, emptiness") {
	auto sigma = acpq();
	std::mt19937 rng(6);
	auto trees = enumerate_trees(sigma, 7);
	for (int rep = 0; rep < 25; ++rep) {
		auto a = random_dbta(rng, sigma, 3, 0.8);
		auto b = random_dbta(rng, sigma, 2, 0.8);
		auto conj = product(a, b, BoolOp::conj);
		auto disj = product(a, b, BoolOp::disj);
		auto diff = product(a, b, BoolOp::diff);
		auto ca = complement(a);
		auto cca = complement(ca);
		CHECK(ca.is_total());
		for (const auto& t : trees) {
			bool x = accepts(a, t), y = accepts(b, t);
			CHECK(accepts(conj, t) == (x && y));
			CHECK(accepts(disj, t) == (x || y));
			CHECK(accepts(diff, t) == (x && !y));
			CHECK(accepts(ca, t) == !x);
			CHECK(accepts(cca, t) == x);
		}
		CHECK(is_empty(product(a, a, BoolOp::diff)).empty);

		// Witness is accepted and is the smallest accepted tree in enumeration order.
		auto e = is_empty(a);
		std::optional<Tree> first;
		for (const auto& t : trees)
			if (accepts(a, t)) {
				first = t;
				break;
			}
		if (e.empty) {
			CHECK_FALSE(first.has_value());
		} else {
			REQUIRE(e.witness);
			CHECK(accepts(a, *e.witness));
			if (first) CHECK(*e.witness == *first);
		}
	}
	CHECK_THROWS_AS(product(p_parity(apq()), p_parity(acpq()), BoolOp::conj), AlphabetError);
}

TEST_CASE("Dbta and Nta text formats") {
	auto a = p_parity(apq());
	auto text = write_dbta(a);
	CHECK(text ==
	      "alphabet: a/2 p/0 q/0\n"
	      "states: even odd\n"
	      "accepting: even\n"
	      "a(even,even) -> even\n"
	      "a(even,odd) -> odd\n"
	      "a(odd,even) -> odd\n"
	      "a(odd,odd) -> even\n"
	      "p -> odd\n"
	      "q -> even\n");
	CHECK(write_dbta(parse_dbta(text)) == text);

	auto multi = parse_dbta("alphabet:\n a/2\n p/0 q/0\nstates: x y # comment\naccepting: y\np() -> x\nq -> y\na(x,y) -> y\n");
	CHECK(multi.num_states() == 2);
	CHECK(accepts(multi, tree("a(p,q)")));
	CHECK(eval(multi, tree("a(q,q)")) == sink_state);

	CHECK_THROWS_AS(parse_dbta("alphabet: a/2 p/0\nstates: x\np -> z\n"), ParseError);
	CHECK_THROWS_AS(parse_dbta("alphabet: a/2 p/0\nstates: x\na(x) -> x\n"), ParseError);
	CHECK_THROWS_AS(parse_dbta("alphabet: a/2 p/0\nstates: x\np -> x\np -> x\n"), ParseError);
	CHECK_THROWS_AS(parse_dbta("states: x\n"), ParseError);
	try {
		parse_dbta("alphabet: a/2 p/0\nstates: x\n\nb -> x\n");
		FAIL("expected a parse error");
	} catch (const ParseError& e) {
		CHECK(e.line() == 4);
	}

	std::mt19937 rng(8);
	for (int rep = 0; rep < 10; ++rep) {
		auto n = random_nta(rng, acpq(), 3);
		auto nt = write_nta(n);
		CHECK(write_nta(parse_nta(nt)) == nt);
		auto d = random_dbta(rng, acpq(), 4, 0.7);
		CHECK(write_dbta(parse_dbta(write_dbta(d))) == write_dbta(d));
	}
}

TEST_CASE("reachable_states") {
	Dbta a(apq());
	a.add_state("x");
	a.add_state("unused");
	a.set_transition("p", {}, 0);
	a.set_transition("a", {0, 0}, 0);
	CHECK(reachable_states(a) == std::vector<State>{0, sink_state});
	CHECK(reachable_states(p_parity(apq())) == std::vector<State>{0, 1});
	CHECK(trim(a).num_states() == 1);
}
