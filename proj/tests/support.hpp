#pragma once

// Shared generators and oracles for the test suites.

#include <functional>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "twsep/tree.hpp"

namespace twsep::testing {

/// Random tree with at most `budget` nodes (at least one). Leaves are drawn
/// from the alphabet's arity-0 letters, inner nodes from the rest.
inline Tree random_tree(std::mt19937& rng, const RankedAlphabet& alphabet, std::size_t budget) {
	std::vector<std::string> inner;
	for (const auto& l : alphabet.letters())
		if (*alphabet.arity(l) > 0) inner.push_back(l);
	auto leaves = alphabet.leaves();
	auto pick = [&](const std::vector<std::string>& v) {
		return v[std::uniform_int_distribution<std::size_t>(0, v.size() - 1)(rng)];
	};
	std::vector<std::string> fitting;
	for (const auto& l : inner)
		if (*alphabet.arity(l) + 1 <= budget) fitting.push_back(l);
	if (fitting.empty() || std::uniform_int_distribution<int>(0, 2)(rng) == 0) return Tree::leaf(pick(leaves));
	auto label = pick(fitting);
	auto ar = *alphabet.arity(label);
	std::size_t left = budget - 1;
	std::vector<Tree> kids;
	for (unsigned i = 0; i < ar; ++i) {
		std::size_t reserve = ar - i - 1;
		std::size_t mine = std::uniform_int_distribution<std::size_t>(1, left - reserve)(rng);
		if (i + 1 == ar) mine = left;
		Tree k = random_tree(rng, alphabet, mine);
		left -= k.size();
		kids.push_back(k);
	}
	return Tree(label, std::move(kids));
}

/// Decodes a preorder label sequence into a tree if it is exactly one tree.
inline std::optional<Tree> decode_preorder(const std::vector<std::string>& seq, const RankedAlphabet& alphabet) {
	std::size_t pos = 0;
	std::function<std::optional<Tree>()> go = [&]() -> std::optional<Tree> {
		if (pos >= seq.size()) return std::nullopt;
		const auto& label = seq[pos++];
		unsigned ar = label == port_label ? 0 : *alphabet.arity(label);
		std::vector<Tree> kids;
		for (unsigned i = 0; i < ar; ++i) {
			auto k = go();
			if (!k) return std::nullopt;
			kids.push_back(*k);
		}
		return Tree(label, std::move(kids));
	};
	auto t = go();
	if (!t || pos != seq.size()) return std::nullopt;
	return t;
}

/// Brute force: every preorder sequence over letters ∪ {*} of length ≤ max_nodes
/// that decodes to a term with exactly `ports` ports.
inline std::set<Tree> brute_force_terms(const RankedAlphabet& alphabet, std::size_t ports, std::size_t max_nodes) {
	std::vector<std::string> symbols = alphabet.letters();
	symbols.push_back(port_label);
	std::set<Tree> out;
	std::vector<std::string> seq;
	std::function<void()> rec = [&]() {
		if (!seq.empty())
			if (auto t = decode_preorder(seq, alphabet); t && Term(*t).arity() == ports) out.insert(*t);
		if (seq.size() == max_nodes) return;
		for (const auto& s : symbols) {
			seq.push_back(s);
			rec();
			seq.pop_back();
		}
	};
	rec();
	return out;
}

/// All words over `letters` with length in [min_len, max_len], shortest first then lexicographic.
inline std::vector<Word> all_words(const std::vector<std::string>& letters, std::size_t min_len, std::size_t max_len) {
	std::vector<Word> out;
	std::vector<Word> layer{Word{}};
	for (std::size_t len = 0; len <= max_len; ++len) {
		if (len >= min_len) out.insert(out.end(), layer.begin(), layer.end());
		std::vector<Word> next;
		for (const auto& w : layer)
			for (const auto& l : letters) {
				auto x = w;
				x.push_back(l);
				next.push_back(std::move(x));
			}
		layer = std::move(next);
	}
	return out;
}

} // namespace twsep::testing
