#include <catch_amalgamated.hpp>

#include <random>

#include "fixtures.hpp"
#include "support.hpp"
#include "twsep/grammar.hpp"

using namespace twsep;
using namespace twsep::testing;

namespace {

Word word(std::string_view s) {
	Word w;
	for (char c : s) w.emplace_back(1, c);
	return w;
}

/// Top-down derivation enumeration straight from the rules, without a CYK table.
std::set<Tree> brute_derivations(const CnfGrammar& g, const std::string& x, const Word& w, std::size_t from, std::size_t len) {
	std::set<Tree> out;
	if (len == 1) {
		if (g.has_leaf_rule(x, w[from])) out.insert(Tree::leaf(w[from]));
		return out;
	}
	for (const auto& r : g.binary_rules()) {
		if (r.lhs != x) continue;
		for (std::size_t k = 1; k < len; ++k)
			for (const auto& a : brute_derivations(g, r.left, w, from, k))
				for (const auto& b : brute_derivations(g, r.right, w, from + k, len - k)) out.insert(Tree(x, {a, b}));
	}
	return out;
}

bool palindrome(const Word& w) { return std::equal(w.begin(), w.end(), w.rbegin()); }

std::vector<CnfGrammar> all_fixtures() {
	return {grammars::pq(), grammars::pn_qn(), grammars::p_initial(), grammars::q_initial(), grammars::palindromes(),
	        grammars::non_palindromes(), parse_grammar("S -> S S | p | q")};
}

} // namespace

TEST_CASE("parse_grammar") {
	auto g = parse_grammar("S -> A B; A -> p; B -> q");
	CHECK(g.start() == "S");
	CHECK(g.terminals() == std::vector<std::string>{"p", "q"});
	CHECK(g.nonterminals() == std::vector<std::string>{"A", "B", "S"});
	CHECK(g.binary_rules().size() == 1);
	CHECK(generate_words(g, 6) == std::vector<Word>{word("pq")});

	auto with_start = parse_grammar("# comment\nstart: T\nS -> p\nT -> S S\n");
	CHECK(with_start.start() == "T");
	CHECK(generate_words(with_start, 4) == std::vector<Word>{word("pp")});

	CHECK_THROWS_AS(parse_grammar("S -> A B C; A -> p; B -> p; C -> p"), ParseError);
	CHECK_THROWS_AS(parse_grammar("S -> A; A -> p"), ParseError);
	CHECK_THROWS_AS(parse_grammar("S -> "), ParseError);
	CHECK_THROWS_AS(parse_grammar("S A -> p"), ParseError);
	CHECK_THROWS_AS(parse_grammar(""), ParseError);
	CHECK_THROWS_AS(parse_grammar("S -> A p; A -> p; B -> A"), ParseError);
	CHECK_THROWS_AS(parse_grammar("S -> p\nstart: S"), ParseError);
	try {
		parse_grammar("S -> A B\nA -> p\nB -> q r s\n");
		FAIL("expected a parse error");
	} catch (const ParseError& e) {
		CHECK(e.line() == 3);
		CHECK(std::string(e.what()).find("B -> q r s") != std::string::npos);
	}
	// A terminal reused as a nonterminal.
	CHECK_THROWS_AS(parse_grammar("S -> A p; A -> p; p -> q"), ParseError);
}

TEST_CASE("normalization drops useless symbols") {
	auto g = parse_grammar("S -> A B | A D; A -> p; B -> q; D -> D D; E -> p");
	CHECK(g.nonterminals() == std::vector<std::string>{"A", "B", "S"});
	CHECK(g.removed() == std::vector<std::string>{"D", "E"});
	CHECK(g.binary_rules().size() == 1);

	auto empty = parse_grammar("S -> S S");
	CHECK(empty.nonterminals() == std::vector<std::string>{"S"});
	CHECK(empty.binary_rules().empty());
	CHECK(generate_words(empty, 5).empty());
	CHECK(write_grammar(parse_grammar(write_grammar(g))) == write_grammar(g));
}

TEST_CASE("cyk_member") {
	auto g = grammars::pn_qn();
	CHECK(cyk_member(g, word("ppqq")));
	CHECK_FALSE(cyk_member(g, word("pqq")));
	CHECK(cyk_member(parse_grammar("S -> p"), word("p")));
	CHECK_THROWS_AS(cyk_member(g, Word{}), UnsupportedError);
	CHECK_THROWS_AS(cyk_member(g, word("pr")), AlphabetError);
	CHECK(grammars::palindromes().terminals() == std::vector<std::string>{"p", "q"});
	CHECK(cyk_member(grammars::palindromes(), word("pqp")));
}

TEST_CASE("languages of the fixture grammars") {
	for (const auto& w : all_words({"p", "q"}, 1, 8)) {
		INFO(to_string(w));
		CHECK(cyk_member(grammars::palindromes(), w) == (w.size() >= 2 && palindrome(w)));
		CHECK(cyk_member(grammars::non_palindromes(), w) == (w.size() >= 2 && !palindrome(w)));
		CHECK(cyk_member(grammars::p_initial(), w) == (w[0] == "p"));
		CHECK(cyk_member(grammars::q_initial(), w) == (w[0] == "q"));
		auto half = w.size() / 2;
		bool pnqn = w.size() % 2 == 0 && std::all_of(w.begin(), w.begin() + half, [](auto& x) { return x == "p"; }) &&
		            std::all_of(w.begin() + half, w.end(), [](auto& x) { return x == "q"; });
		CHECK(cyk_member(grammars::pn_qn(), w) == pnqn);
	}
}

TEST_CASE("derivations") {
	auto g = grammars::pq();
	auto ds = derivations(g, word("pq"));
	REQUIRE(ds.size() == 1);
	CHECK(to_string(ds[0]) == "S(p,q)");
	CHECK(derivations(g, word("qp")).empty());
	CHECK(derivations(parse_grammar("S -> p"), word("p")) == std::vector<Tree>{Tree::leaf("p")});

	// S -> S S | p: the number of derivations of pⁿ is the Catalan number C(n-1).
	auto amb = parse_grammar("S -> S S | p");
	std::vector<std::size_t> catalan{1, 1, 2, 5, 14, 42};
	for (std::size_t n = 1; n <= 6; ++n) CHECK(derivations(amb, Word(n, "p")).size() == catalan[n - 1]);

	for (const auto& grammar : all_fixtures()) {
		for (const auto& w : all_words(grammar.terminals(), 1, 6)) {
			auto d = derivations(grammar, w);
			auto brute = brute_derivations(grammar, grammar.start(), w, 0, w.size());
			CHECK(std::set<Tree>(d.begin(), d.end()) == brute);
			CHECK(cyk_member(grammar, w) == !d.empty());
			for (const auto& t : d) {
				CHECK(yield(t) == w);
				CHECK(is_derivation(grammar, t));
			}
		}
	}
}

TEST_CASE("is_derivation") {
	auto g = grammars::pn_qn();
	CHECK(is_derivation(g, parse_tree("S(p,T(S(p,q),q))")));
	CHECK_FALSE(is_derivation(g, parse_tree("S(p,T(S(p,q),p))")));
	CHECK_FALSE(is_derivation(g, parse_tree("T(S(p,q),q)")));
	CHECK(is_derivation(g, parse_tree("T(S(p,q),q)"), "T"));
	CHECK_FALSE(is_derivation(g, parse_tree("p")));
}

TEST_CASE("generate_words") {
	std::mt19937 rng(11);
	auto grammars_under_test = all_fixtures();
	for (int i = 0; i < 20; ++i) grammars_under_test.push_back(random_grammar(rng, 4, 6));
	for (const auto& g : grammars_under_test) {
		std::vector<Word> expected;
		for (const auto& w : all_words({"p", "q"}, 1, 6))
			if (std::all_of(w.begin(), w.end(), [&](auto& x) { return g.is_terminal(x); }) && cyk_member(g, w))
				expected.push_back(w);
		CHECK(generate_words(g, 6) == expected);
	}
}

TEST_CASE("root shape of the palindrome fixture derivations") {
	auto g = grammars::palindromes();
	auto h = grammars::non_palindromes();
	for (const auto& w : all_words({"p", "q"}, 2, 7)) {
		for (const auto& d : derivations(g, w)) CHECK(d.child(1).is_leaf());
		for (const auto& d : derivations(h, w)) CHECK(d.child(0).is_leaf());
	}
}
