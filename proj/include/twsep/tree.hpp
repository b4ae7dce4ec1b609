#pragma once

// Ranked alphabets, trees, linear terms with ports, and their text encodings.

#include <algorithm>
#include <compare>
#include <cstddef>
#include <functional>
#include <initializer_list>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "twsep/detail/text.hpp"
#include "twsep/error.hpp"

namespace twsep {

/// A word over arity-0 letters. Letters are whole tokens, not characters.
using Word = std::vector<std::string>;

/// Label of a port in a term. Reserved: no alphabet may contain it.
inline const std::string port_label = "*";

inline std::string to_string(const Word& w) { return detail::join(w, " "); }

class Tree;

class RankedAlphabet {
public:
	RankedAlphabet() = default;

	RankedAlphabet(std::initializer_list<std::pair<std::string, unsigned>> letters)
		: RankedAlphabet(std::map<std::string, unsigned>(letters.begin(), letters.end())) {}

	explicit RankedAlphabet(const std::map<std::string, unsigned>& letters) {
		bool has_leaf = false;
		for (const auto& [name, arity] : letters) {
			if (name == port_label) throw AlphabetError("the port symbol '*' is reserved");
			if (!detail::is_alnum_token(name)) throw AlphabetError("letter '" + name + "' is not alphanumeric");
			names_.push_back(name);
			arities_.push_back(arity);
			maxarity_ = std::max(maxarity_, arity);
			has_leaf = has_leaf || arity == 0;
		}
		if (!has_leaf) throw AlphabetError("a ranked alphabet needs at least one letter of arity 0");
	}

	/// Parses `a/2 c/0 p/0` (commas also separate).
	static RankedAlphabet parse(std::string_view text) {
		std::map<std::string, unsigned> letters;
		for (const auto& item : detail::split_ws(text, ",")) {
			auto slash = item.find('/');
			if (slash == std::string::npos) throw AlphabetError("expected letter/arity, got '" + item + "'");
			auto name = item.substr(0, slash);
			auto digits = item.substr(slash + 1);
			if (digits.empty() || digits.find_first_not_of("0123456789") != std::string::npos)
				throw AlphabetError("bad arity in '" + item + "'");
			if (!letters.emplace(name, static_cast<unsigned>(std::stoul(digits))).second)
				throw AlphabetError("letter '" + name + "' declared twice");
		}
		return RankedAlphabet(letters);
	}

	bool empty() const noexcept { return names_.empty(); }
	std::size_t size() const noexcept { return names_.size(); }
	unsigned maxarity() const noexcept { return maxarity_; }

	/// Letters in lexicographic order; indices into this vector are letter ids.
	const std::vector<std::string>& letters() const noexcept { return names_; }
	unsigned arity_at(std::size_t index) const { return arities_.at(index); }

	std::optional<std::size_t> find(std::string_view letter) const {
		auto it = std::lower_bound(names_.begin(), names_.end(), letter);
		if (it == names_.end() || *it != letter) return std::nullopt;
		return static_cast<std::size_t>(it - names_.begin());
	}

	std::size_t index_of(std::string_view letter) const {
		if (auto i = find(letter)) return *i;
		throw AlphabetError("letter '" + std::string(letter) + "' is not in the alphabet");
	}

	bool contains(std::string_view letter) const { return find(letter).has_value(); }

	std::optional<unsigned> arity(std::string_view letter) const {
		if (auto i = find(letter)) return arities_[*i];
		return std::nullopt;
	}

	/// Arity-0 letters, sorted.
	std::vector<std::string> leaves() const {
		std::vector<std::string> out;
		for (std::size_t i = 0; i < names_.size(); ++i)
			if (arities_[i] == 0) out.push_back(names_[i]);
		return out;
	}

	std::map<std::string, unsigned> as_map() const {
		std::map<std::string, unsigned> out;
		for (std::size_t i = 0; i < names_.size(); ++i) out.emplace(names_[i], arities_[i]);
		return out;
	}

	/// Union with extra letters; a letter present in both must agree on arity.
	RankedAlphabet extended(const std::map<std::string, unsigned>& extra) const {
		auto merged = as_map();
		for (const auto& [name, ar] : extra) {
			auto [it, inserted] = merged.emplace(name, ar);
			if (!inserted && it->second != ar)
				throw AlphabetError("letter '" + name + "' used with arities " + std::to_string(it->second) +
				                    " and " + std::to_string(ar));
		}
		return RankedAlphabet(merged);
	}

	std::string to_string() const {
		std::string out;
		for (std::size_t i = 0; i < names_.size(); ++i) {
			if (i) out += ' ';
			out += names_[i] + "/" + std::to_string(arities_[i]);
		}
		return out;
	}

	/// Throws AlphabetError unless every node label is a letter of matching arity.
	/// Ports are accepted when `allow_ports` is set.
	void check(const Tree& tree, bool allow_ports = false) const;

	friend bool operator==(const RankedAlphabet&, const RankedAlphabet&) = default;

private:
	std::vector<std::string> names_;
	std::vector<unsigned> arities_;
	unsigned maxarity_ = 0;
};

struct TreeNode;

/// Immutable ranked tree. Copies share structure.
class Tree {
public:
	explicit Tree(std::string label, std::vector<Tree> children = {});

	static Tree leaf(std::string label) { return Tree(std::move(label)); }

	const std::string& label() const noexcept;
	std::span<const Tree> children() const noexcept;
	const Tree& child(std::size_t i) const { return children()[i]; }
	std::size_t arity() const noexcept { return children().size(); }
	bool is_leaf() const noexcept { return arity() == 0; }
	bool is_port() const noexcept { return is_leaf() && label() == port_label; }
	/// Node count.
	std::size_t size() const noexcept;
	std::size_t hash() const noexcept;

	friend bool operator==(const Tree& a, const Tree& b);
	/// Orders by node count, then lexicographically by the preorder sequence of (label, arity).
	friend std::strong_ordering operator<=>(const Tree& a, const Tree& b);

private:
	std::shared_ptr<const TreeNode> node_;
};

struct TreeNode {
	std::string label;
	std::vector<Tree> children;
	std::size_t size = 1;
	std::size_t hash = 0;
};

inline Tree::Tree(std::string label, std::vector<Tree> children) {
	auto node = std::make_shared<TreeNode>();
	std::size_t h = std::hash<std::string>{}(label);
	std::size_t size = 1;
	for (const auto& c : children) {
		size += c.size();
		h = h * 1000003u ^ c.hash();
	}
	node->label = std::move(label);
	node->children = std::move(children);
	node->size = size;
	node->hash = h;
	node_ = std::move(node);
}

inline const std::string& Tree::label() const noexcept { return node_->label; }
inline std::span<const Tree> Tree::children() const noexcept { return node_->children; }
inline std::size_t Tree::size() const noexcept { return node_->size; }
inline std::size_t Tree::hash() const noexcept { return node_->hash; }

inline bool operator==(const Tree& a, const Tree& b) {
	if (a.node_ == b.node_) return true;
	if (a.hash() != b.hash() || a.size() != b.size() || a.label() != b.label() || a.arity() != b.arity())
		return false;
	for (std::size_t i = 0; i < a.arity(); ++i)
		if (!(a.child(i) == b.child(i))) return false;
	return true;
}

inline std::strong_ordering operator<=>(const Tree& a, const Tree& b) {
	if (auto c = a.size() <=> b.size(); c != 0) return c;
	// Walk both preorders in lockstep.
	std::vector<const Tree*> sa{&a}, sb{&b};
	while (!sa.empty() && !sb.empty()) {
		const Tree* x = sa.back();
		const Tree* y = sb.back();
		sa.pop_back();
		sb.pop_back();
		if (x->node_ == y->node_) continue;
		if (auto c = x->label().compare(y->label()); c != 0) return c < 0 ? std::strong_ordering::less : std::strong_ordering::greater;
		if (auto c = x->arity() <=> y->arity(); c != 0) return c;
		for (std::size_t i = x->arity(); i-- > 0;) {
			sa.push_back(&x->child(i));
			sb.push_back(&y->child(i));
		}
	}
	return sa.size() <=> sb.size();
}

struct TreeHash {
	std::size_t operator()(const Tree& t) const noexcept { return t.hash(); }
};

namespace detail {

inline void collect_ranking(const Tree& t, std::map<std::string, unsigned>& ranking) {
	if (t.is_port()) return;
	auto [it, inserted] = ranking.emplace(t.label(), static_cast<unsigned>(t.arity()));
	if (!inserted && it->second != t.arity())
		throw AlphabetError("letter '" + t.label() + "' used with arities " + std::to_string(it->second) + " and " +
		                    std::to_string(t.arity()));
	for (const auto& c : t.children()) collect_ranking(c, ranking);
}

inline std::size_t count_ports(const Tree& t) {
	if (t.is_port()) return 1;
	std::size_t n = 0;
	for (const auto& c : t.children()) n += count_ports(c);
	return n;
}

} // namespace detail

inline void RankedAlphabet::check(const Tree& tree, bool allow_ports) const {
	if (tree.is_port()) {
		if (!allow_ports) throw AlphabetError("unexpected port '*' in a tree");
		return;
	}
	auto ar = arity(tree.label());
	if (!ar) throw AlphabetError("letter '" + tree.label() + "' is not in the alphabet");
	if (*ar != tree.arity())
		throw AlphabetError("letter '" + tree.label() + "' has arity " + std::to_string(*ar) + " but the node has " +
		                    std::to_string(tree.arity()) + " children");
	for (const auto& c : tree.children()) check(c, allow_ports);
}

/// Label-to-arity map of all letters occurring in the trees; ports are skipped.
/// Throws AlphabetError if a label is used with two arities.
inline std::map<std::string, unsigned> ranking_of(std::span<const Tree> trees) {
	std::map<std::string, unsigned> ranking;
	for (const auto& t : trees) detail::collect_ranking(t, ranking);
	return ranking;
}

/// A tree over Σ ∪ {*}. Ports are numbered 1..n in left-to-right leaf order.
class Term {
public:
	explicit Term(Tree tree) : tree_(std::move(tree)), arity_(detail::count_ports(tree_)) {}

	static Term port() { return Term(Tree::leaf(port_label)); }

	const Tree& tree() const noexcept { return tree_; }
	std::size_t arity() const noexcept { return arity_; }
	std::size_t size() const noexcept { return tree_.size(); }

	Tree to_tree() const {
		if (arity_ != 0) throw ShapeError("term has " + std::to_string(arity_) + " ports, not a tree");
		return tree_;
	}

	friend bool operator==(const Term& a, const Term& b) { return a.tree_ == b.tree_; }
	friend std::strong_ordering operator<=>(const Term& a, const Term& b) { return a.tree_ <=> b.tree_; }

private:
	Tree tree_;
	std::size_t arity_;
};

namespace detail {

inline Tree substitute(const Tree& t, std::span<const Term> args, std::size_t& next) {
	if (t.is_port()) return args[next++].tree();
	if (t.is_leaf()) return t;
	std::vector<Tree> kids;
	kids.reserve(t.arity());
	for (const auto& c : t.children()) kids.push_back(substitute(c, args, next));
	return Tree(t.label(), std::move(kids));
}

} // namespace detail

/// t(args[0], ..., args[n-1]): the i-th port of t is replaced by args[i].
inline Term compose(const Term& t, std::span<const Term> args) {
	if (args.size() != t.arity())
		throw ArityError("term has " + std::to_string(t.arity()) + " ports but " + std::to_string(args.size()) +
		                 " arguments were given");
	std::vector<Tree> all{t.tree()};
	for (const auto& a : args) all.push_back(a.tree());
	(void)ranking_of(all); // alphabet consistency
	std::size_t next = 0;
	return Term(detail::substitute(t.tree(), args, next));
}

inline Term compose(const Term& t, std::initializer_list<Term> args) {
	return compose(t, std::span<const Term>(args.begin(), args.size()));
}

/// As compose, additionally requiring every term to conform to `alphabet`.
inline Term compose(const Term& t, std::span<const Term> args, const RankedAlphabet& alphabet) {
	alphabet.check(t.tree(), true);
	for (const auto& a : args) alphabet.check(a.tree(), true);
	return compose(t, args);
}

/// The n-port left comb t(t(...t(*,*)...,*),*). n ≥ 1; n = 1 gives the port itself.
inline Term left_comb(const Term& t, std::size_t n) {
	if (t.arity() != 2) throw ArityError("comb needs a binary term");
	if (n == 0) throw SizeError("comb needs at least one port");
	Term acc = Term::port();
	for (std::size_t i = 1; i < n; ++i) acc = compose(t, {acc, Term::port()});
	return acc;
}

/// comb(a1,...,an) = t(t(...t(a1,a2)...,a_{n-1}),a_n).
inline Tree comb(const Term& t, const Word& xs) {
	if (xs.size() < 2) throw SizeError("comb needs at least two letters, got " + std::to_string(xs.size()));
	std::vector<Term> leaves;
	leaves.reserve(xs.size());
	for (const auto& x : xs) {
		if (x == port_label) throw AlphabetError("comb letters must not be ports");
		leaves.emplace_back(Tree::leaf(x));
	}
	return compose(left_comb(t, xs.size()), leaves).to_tree();
}

/// 1-based child indices from the root.
using NodePath = std::vector<std::size_t>;

inline std::string to_string(const NodePath& path) {
	if (path.empty()) return "/";
	std::string out;
	for (auto i : path) out += "/" + std::to_string(i);
	return out;
}

enum class Rotation {
	/// t(t(x,y),z) -> t(x,t(y,z))
	right,
	/// t(x,t(y,z)) -> t(t(x,y),z)
	left,
};

namespace detail {

inline Tree rotate_here(const Tree& node, Rotation dir) {
	if (node.arity() != 2) throw ShapeError("rotation needs a binary node, found '" + node.label() + "'");
	const auto& label = node.label();
	if (dir == Rotation::right) {
		const Tree& l = node.child(0);
		if (l.arity() != 2 || l.label() != label)
			throw ShapeError("right rotation needs a left child labelled '" + label + "'");
		return Tree(label, {l.child(0), Tree(label, {l.child(1), node.child(1)})});
	}
	const Tree& r = node.child(1);
	if (r.arity() != 2 || r.label() != label)
		throw ShapeError("left rotation needs a right child labelled '" + label + "'");
	return Tree(label, {Tree(label, {node.child(0), r.child(0)}), r.child(1)});
}

inline Tree rotate_path(const Tree& t, const NodePath& path, std::size_t depth, Rotation dir) {
	if (depth == path.size()) return rotate_here(t, dir);
	auto i = path[depth];
	if (i == 0 || i > t.arity()) throw ShapeError("invalid node path " + to_string(path));
	std::vector<Tree> kids(t.children().begin(), t.children().end());
	kids[i - 1] = rotate_path(kids[i - 1], path, depth + 1, dir);
	return Tree(t.label(), std::move(kids));
}

} // namespace detail

/// One rotation at the node addressed by `path`; the leaf sequence is unchanged.
inline Tree rotate_at(const Tree& t, const NodePath& path, Rotation dir) {
	return detail::rotate_path(t, path, 0, dir);
}

inline Term rotate_at(const Term& t, const NodePath& path, Rotation dir) {
	return Term(rotate_at(t.tree(), path, dir));
}

/// Left-to-right leaf labels, including ports.
inline Word leaf_word(const Tree& t) {
	Word out;
	std::vector<const Tree*> stack{&t};
	while (!stack.empty()) {
		const Tree* n = stack.back();
		stack.pop_back();
		if (n->is_leaf()) {
			out.push_back(n->label());
			continue;
		}
		for (std::size_t i = n->arity(); i-- > 0;) stack.push_back(&n->child(i));
	}
	return out;
}

/// Left-to-right leaf labels restricted to `keep`.
inline Word leaf_word(const Tree& t, const std::set<std::string>& keep) {
	Word out;
	for (auto& l : leaf_word(t))
		if (keep.count(l)) out.push_back(std::move(l));
	return out;
}

namespace detail {

/// All trees over alphabet ∪ {*} with exactly `size` nodes and `ports` ports, memoized per call.
class TermGenerator {
public:
	explicit TermGenerator(const RankedAlphabet& alphabet) : alphabet_(alphabet) {}

	const std::vector<Tree>& get(std::size_t size, std::size_t ports) {
		auto key = std::make_pair(size, ports);
		if (auto it = memo_.find(key); it != memo_.end()) return it->second;
		std::vector<Tree> out;
		if (size == 1) {
			if (ports == 1) out.push_back(Tree::leaf(port_label));
			if (ports == 0)
				for (const auto& l : alphabet_.leaves()) out.push_back(Tree::leaf(l));
		} else {
			for (std::size_t li = 0; li < alphabet_.size(); ++li) {
				auto ar = alphabet_.arity_at(li);
				if (ar == 0 || ar > size - 1) continue;
				std::vector<Tree> kids;
				fill(alphabet_.letters()[li], ar, size - 1, ports, kids, out);
			}
		}
		std::sort(out.begin(), out.end());
		return memo_.emplace(key, std::move(out)).first->second;
	}

private:
	// Chooses (size, ports) for each remaining child and takes the product.
	void fill(const std::string& label, unsigned arity, std::size_t size_left, std::size_t ports_left,
	          std::vector<Tree>& kids, std::vector<Tree>& out) {
		std::size_t remaining = arity - kids.size();
		if (remaining == 0) {
			if (size_left == 0 && ports_left == 0) out.emplace_back(label, kids);
			return;
		}
		if (size_left < remaining) return;
		std::size_t max_here = size_left - (remaining - 1);
		for (std::size_t s = 1; s <= max_here; ++s) {
			if (remaining == 1 && s != size_left) continue;
			for (std::size_t p = 0; p <= std::min(ports_left, s); ++p) {
				if (remaining == 1 && p != ports_left) continue;
				const auto& options = get(s, p);
				for (const auto& o : options) {
					kids.push_back(o);
					fill(label, arity, size_left - s, ports_left - p, kids, out);
					kids.pop_back();
				}
			}
		}
	}

	const RankedAlphabet& alphabet_;
	std::map<std::pair<std::size_t, std::size_t>, std::vector<Tree>> memo_;
};

} // namespace detail

/// Every term of the given arity with at most `max_nodes` nodes (ports count as nodes),
/// ordered by node count and then lexicographically, without duplicates.
inline std::vector<Term> enumerate_terms(const RankedAlphabet& alphabet, std::size_t arity, std::size_t max_nodes) {
	if (max_nodes < 1) throw SizeError("max_nodes must be at least 1");
	detail::TermGenerator gen(alphabet);
	std::vector<Term> out;
	for (std::size_t size = 1; size <= max_nodes; ++size)
		for (const auto& t : gen.get(size, arity)) out.emplace_back(t);
	return out;
}

inline std::vector<Tree> enumerate_trees(const RankedAlphabet& alphabet, std::size_t max_nodes) {
	std::vector<Tree> out;
	for (auto& t : enumerate_terms(alphabet, 0, max_nodes)) out.push_back(t.tree());
	return out;
}

// ---------------------------------------------------------------------------
// Text formats

inline std::string to_string(const Tree& t) {
	std::string out;
	out.reserve(t.size() * 3);
	std::vector<std::pair<const Tree*, std::size_t>> stack{{&t, 0}};
	out += t.label();
	// Iterative to keep deep combs off the call stack.
	while (!stack.empty()) {
		auto& [node, next] = stack.back();
		if (node->is_leaf()) {
			stack.pop_back();
			continue;
		}
		if (next == node->arity()) {
			out += ')';
			stack.pop_back();
			continue;
		}
		out += next == 0 ? '(' : ',';
		const Tree* c = &node->child(next++);
		out += c->label();
		stack.emplace_back(c, 0);
	}
	return out;
}

inline std::string to_string(const Term& t) { return to_string(t.tree()); }

inline std::ostream& operator<<(std::ostream& os, const Tree& t) { return os << to_string(t); }
inline std::ostream& operator<<(std::ostream& os, const Term& t) { return os << to_string(t); }

/// The XML encoding: `<label>children</label>`, no attributes, no whitespace.
inline std::string encode_xml(const Tree& t) {
	std::string out = "<" + t.label() + ">";
	for (const auto& c : t.children()) out += encode_xml(c);
	out += "</" + t.label() + ">";
	return out;
}

namespace detail {

inline Tree parse_sexpr_node(Cursor& cur, bool allow_ports, std::map<std::string, unsigned>& ranking, int depth) {
	if (depth > 100000) cur.fail("tree nesting too deep");
	cur.skip_ws();
	auto line = cur.line(), col = cur.column();
	auto label = cur.token();
	if (label.empty()) cur.fail("expected a letter");
	if (label.find('_') != std::string::npos) throw ParseError("letter '" + label + "' is not alphanumeric", line, col);
	if (label == port_label && !allow_ports) throw ParseError("port '*' is not allowed in a tree", line, col);
	std::vector<Tree> kids;
	if (cur.consume('(')) {
		if (label == port_label) throw ParseError("a port has no children", line, col);
		do {
			kids.push_back(parse_sexpr_node(cur, allow_ports, ranking, depth + 1));
		} while (cur.consume(','));
		cur.expect(')');
	}
	if (label != port_label) {
		auto [it, inserted] = ranking.emplace(label, static_cast<unsigned>(kids.size()));
		if (!inserted && it->second != kids.size())
			throw ParseError("letter '" + label + "' used with arities " + std::to_string(it->second) + " and " +
			                     std::to_string(kids.size()),
			                 line, col);
	}
	return Tree(std::move(label), std::move(kids));
}

inline Tree parse_sexpr(std::string_view text, bool allow_ports) {
	Cursor cur(text);
	std::map<std::string, unsigned> ranking;
	Tree t = parse_sexpr_node(cur, allow_ports, ranking, 0);
	cur.skip_ws();
	if (!cur.eof()) cur.fail("trailing input after tree");
	return t;
}

} // namespace detail

/// Parses `label` or `label(child,...,child)`; whitespace is insignificant.
inline Tree parse_tree(std::string_view text) { return detail::parse_sexpr(text, false); }

inline Tree parse_tree(std::string_view text, const RankedAlphabet& alphabet) {
	Tree t = parse_tree(text);
	alphabet.check(t);
	return t;
}

/// As parse_tree, also accepting ports `*`.
inline Term parse_term(std::string_view text) { return Term(detail::parse_sexpr(text, true)); }

// ---------------------------------------------------------------------------

/// Flattened view of a tree with parent links, for walking automata.
class TreeIndex {
public:
	struct Node {
		const Tree* tree;
		std::size_t parent;       // npos at the root
		std::size_t child_number; // 0 at the root, else 1-based
		std::vector<std::size_t> children;
	};
	static constexpr std::size_t npos = static_cast<std::size_t>(-1);

	explicit TreeIndex(const Tree& root) : root_(root) {
		nodes_.reserve(root.size());
		nodes_.push_back({&root_, npos, 0, {}});
		for (std::size_t i = 0; i < nodes_.size(); ++i) {
			const Tree* t = nodes_[i].tree;
			for (std::size_t k = 0; k < t->arity(); ++k) {
				nodes_.push_back({&t->child(k), i, k + 1, {}});
				nodes_[i].children.push_back(nodes_.size() - 1);
			}
		}
	}

	TreeIndex(const TreeIndex&) = delete;
	TreeIndex& operator=(const TreeIndex&) = delete;

	std::size_t size() const noexcept { return nodes_.size(); }
	const Node& operator[](std::size_t i) const { return nodes_[i]; }

	NodePath path(std::size_t i) const {
		NodePath p;
		for (; nodes_[i].parent != npos; i = nodes_[i].parent) p.push_back(nodes_[i].child_number);
		std::reverse(p.begin(), p.end());
		return p;
	}

private:
	Tree root_;
	std::vector<Node> nodes_;
};

} // namespace twsep

template <>
struct std::hash<twsep::Tree> {
	std::size_t operator()(const twsep::Tree& t) const noexcept { return t.hash(); }
};
