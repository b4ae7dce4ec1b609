// twsep: command-line front end for the tree automata and separator pipeline.
//
// Exit codes: 0 success or true verdict, 1 false verdict, 2 error,
// 3 search bound exhausted.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "twsep/report.hpp"
#include "twsep/twsep.hpp"

namespace fs = std::filesystem;
using namespace twsep;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_false = 1;
constexpr int exit_error = 2;
constexpr int exit_exhausted = 3;

/// A failure tied to an input file.
struct InputError : std::runtime_error {
	using std::runtime_error::runtime_error;
};

struct Config {
	std::vector<std::string> inputs;
	std::string out;
	std::string format = "sexpr";
	std::string alphabet;
	std::string term;
	std::string letters = "p q";
	std::size_t bound = 9;
	std::size_t max_size = 7;
	std::size_t states = 3;
	unsigned threads = 1;
	std::uint64_t seed = 1;
	bool trace = false;
};

std::string slurp(const std::string& path) {
	std::ifstream in(path, std::ios::binary);
	if (!in) throw InputError(path + ": cannot open");
	std::ostringstream ss;
	ss << in.rdbuf();
	return ss.str();
}

/// Reads and parses one input, prefixing parse errors with the file name.
template <class F>
auto load(const std::string& path, F parse) {
	auto text = slurp(path);
	try {
		return parse(text);
	} catch (const ParseError& e) {
		throw InputError(path + ":" + std::to_string(e.line()) + ":" + std::to_string(e.column()) + ": " + e.message());
	} catch (const Error& e) {
		throw InputError(path + ": " + e.what());
	}
}

Tree load_tree(const std::string& p) { return load(p, [](std::string_view s) { return parse_tree(s); }); }
Dtwa load_dtwa(const std::string& p) { return load(p, [](std::string_view s) { return parse_dtwa(s); }); }
Dbta load_dbta(const std::string& p) { return load(p, [](std::string_view s) { return parse_dbta(s); }); }
Dfa load_dfa(const std::string& p) { return load(p, [](std::string_view s) { return parse_dfa(s); }); }
CnfGrammar load_grammar(const std::string& p) { return load(p, [](std::string_view s) { return parse_grammar(s); }); }

class Output {
public:
	explicit Output(const Config& cfg) : path_(cfg.out) {
		if (path_.empty()) return;
		for (const auto& in : cfg.inputs) {
			std::error_code ec;
			if (in == path_ || fs::equivalent(in, path_, ec)) throw Error("--out must differ from the input '" + in + "'");
		}
	}

	std::ostream& stream() { return buf_; }

	void flush() {
		if (path_.empty()) {
			std::cout << buf_.str() << std::flush;
			return;
		}
		std::ofstream f(path_, std::ios::binary);
		f << buf_.str();
		if (!f) throw Error(path_ + ": cannot write");
	}

private:
	std::string path_;
	std::ostringstream buf_;
};

std::string with_newline(std::string s) {
	if (s.empty() || s.back() != '\n') s += '\n';
	return s;
}

int cmd_run(const Config& cfg, Output& out) {
	auto s = load_tree(cfg.inputs.at(0));
	auto w = load_dtwa(cfg.inputs.at(1));
	Trace trace;
	auto r = run(w, s, cfg.trace ? &trace : nullptr);
	for (const auto& line : trace) out.stream() << line << '\n';
	out.stream() << to_string(r.outcome) << " after " << r.steps << " steps\n";
	return r.outcome == Outcome::accept ? exit_ok : exit_false;
}

int cmd_kop(const Config& cfg, Output& out) {
	out.stream() << with_newline(write_nta(kop_nta(load_grammar(cfg.inputs.at(0)))));
	return exit_ok;
}

int cmd_member(const Config& cfg, Output& out) {
	auto g = load_grammar(cfg.inputs.at(0));
	auto s = load_tree(cfg.inputs.at(1));
	bool in = kop_member(g, s);
	out.stream() << (in ? "member" : "not a member") << '\n';
	return in ? exit_ok : exit_false;
}

RankedAlphabet walking_alphabet(const Config& cfg, const Dfa& k) {
	if (!cfg.alphabet.empty()) return RankedAlphabet::parse(cfg.alphabet);
	std::map<std::string, unsigned> m{{obf_inner, 2}, {obf_pad, 0}};
	for (const auto& l : k.alphabet()) m[l] = 0;
	return RankedAlphabet(m);
}

int cmd_dfs(const Config& cfg, Output& out) {
	auto k = load_dfa(cfg.inputs.at(0));
	out.stream() << with_newline(write_dtwa(dfs_from_dfa(k, walking_alphabet(cfg, k))));
	return exit_ok;
}

int cmd_to_dbta(const Config& cfg, Output& out) {
	out.stream() << with_newline(write_dbta(to_dbta(load_dtwa(cfg.inputs.at(0)))));
	return exit_ok;
}

int cmd_minimize(const Config& cfg, Output& out) {
	out.stream() << with_newline(write_dbta(minimize(load_dbta(cfg.inputs.at(0)))));
	return exit_ok;
}

int cmd_find_rotation(const Config& cfg, Output& out) {
	auto r = find_rotation_term(load_dbta(cfg.inputs.at(0)), cfg.bound, cfg.threads);
	if (!r.witness) {
		out.stream() << "exhausted: no associative term with at most " << r.bound << " nodes (" << r.candidates
		             << " checked)\n";
		return exit_exhausted;
	}
	out.stream() << to_string(r.witness->term) << '\n';
	return exit_ok;
}

int cmd_comb_dfa(const Config& cfg, Output& out) {
	auto a = load_dbta(cfg.inputs.at(0));
	std::optional<Term> t;
	if (!cfg.term.empty()) {
		t = parse_term(cfg.term);
	} else if (auto r = find_rotation_term(a, cfg.bound, cfg.threads); r.witness) {
		t = r.witness->term;
	} else {
		std::cerr << "twsep: no associative term with at most " << r.bound << " nodes\n";
		return exit_exhausted;
	}
	std::vector<std::string> gamma;
	for (const auto& l : a.alphabet().letters())
		if (l != obf_pad && a.alphabet().arity(l) == 0u) gamma.push_back(l);
	if (!cfg.alphabet.empty()) gamma = detail::split_ws(cfg.alphabet, ",");
	out.stream() << with_newline(write_dfa(comb_dfa(minimize(a), *t, gamma)));
	return exit_ok;
}

void print_violation(std::ostream& os, const char* label, const std::optional<Word>& w) {
	if (w) os << label << ": " << (w->empty() ? "(empty word)" : to_string(*w)) << '\n';
}

int cmd_verify(const Config& cfg, Output& out) {
	auto k = load_dfa(cfg.inputs.at(0));
	auto g = load_grammar(cfg.inputs.at(1));
	auto h = load_grammar(cfg.inputs.at(2));
	auto r = verify_separator(k, g, h);
	out.stream() << (r.separates ? "separates" : "does not separate") << '\n';
	print_violation(out.stream(), "word of G rejected", r.violation_g);
	print_violation(out.stream(), "word of H accepted", r.violation_h);
	return r.separates ? exit_ok : exit_false;
}

int cmd_extract(const Config& cfg, Output& out) {
	auto w = load_dtwa(cfg.inputs.at(0));
	auto g = load_grammar(cfg.inputs.at(1));
	auto h = load_grammar(cfg.inputs.at(2));
	auto r = extract_separator(w, g, h, cfg.bound, cfg.threads);
	out.stream() << report_json(r).dump(2) << '\n';
	if (r.exhausted()) return exit_exhausted;
	return r.verified() ? exit_ok : exit_false;
}

int cmd_encode(const Config& cfg, Output& out) {
	auto s = load_tree(cfg.inputs.at(0));
	out.stream() << (cfg.format == "xml" ? encode_xml(s) : to_string(s)) << '\n';
	return exit_ok;
}

int cmd_enumerate(const Config& cfg, Output& out) {
	for (const auto& s : enumerate_trees(RankedAlphabet::parse(cfg.alphabet), cfg.max_size))
		out.stream() << (cfg.format == "xml" ? encode_xml(s) : to_string(s)) << '\n';
	return exit_ok;
}

int cmd_words(const Config& cfg, Output& out) {
	for (const auto& w : generate_words(load_grammar(cfg.inputs.at(0)), cfg.max_size)) out.stream() << to_string(w) << '\n';
	return exit_ok;
}

int cmd_random_dfa(const Config& cfg, Output& out) {
	if (cfg.states == 0) throw SizeError("--states must be positive");
	auto letters = detail::split_ws(cfg.letters, ",");
	// splitmix-style draws keep the output independent of the standard library.
	std::uint64_t x = cfg.seed;
	auto draw = [&](std::uint64_t n) {
		x += 0x9e3779b97f4a7c15ULL;
		std::uint64_t z = x;
		z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
		z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
		return (z ^ (z >> 31)) % n;
	};
	Dfa k(letters);
	for (std::size_t i = 0; i < cfg.states; ++i) k.add_state("k" + std::to_string(i), draw(2) == 1);
	k.set_initial(0);
	for (State q = 0; q < cfg.states; ++q)
		for (std::size_t l = 0; l < k.alphabet().size(); ++l) k.set_transition(q, l, static_cast<State>(draw(cfg.states)));
	out.stream() << with_newline(write_dfa(k));
	return exit_ok;
}

} // namespace

int main(int argc, char** argv) {
	CLI::App app{"Tree-walking automata, obfuscated grammars and regular separators"};
	app.require_subcommand(1);
	Config cfg;
	using Handler = int (*)(const Config&, Output&);
	Handler handler = nullptr;

	auto positive = CLI::PositiveNumber;
	auto sub = [&](const char* name, const char* help, Handler h, std::vector<const char*> files) {
		auto* s = app.add_subcommand(name, help);
		for (const auto* f : files) {
			// Each positional fills the next slot of cfg.inputs.
			s->add_option_function<std::string>(
			     f, [&cfg](const std::string& v) { cfg.inputs.push_back(v); }, std::string("input file: ") + f)
			    ->required();
		}
		s->add_option("--out", cfg.out, "write the result to PATH instead of standard output");
		s->callback([&handler, h] { handler = h; });
		return s;
	};

	auto* run_cmd = sub("run", "run a tree-walking automaton on a tree", cmd_run, {"tree", "dtwa"});
	run_cmd->add_flag("--trace", cfg.trace, "print every configuration");
	sub("kop", "automaton for the obfuscation of a CNF grammar", cmd_kop, {"grammar"});
	sub("member", "membership of a tree in the obfuscation of a grammar", cmd_member, {"grammar", "tree"});
	sub("dfs", "walking automaton that reads the leaf word through a word automaton", cmd_dfs, {"dfa"})
	    ->add_option("--alphabet", cfg.alphabet, "ranked alphabet, e.g. \"a/2 c/0 p/0 q/0\"");
	sub("to-dbta", "bottom-up automaton of a walking automaton", cmd_to_dbta, {"dtwa"});
	sub("minimize", "minimal bottom-up automaton", cmd_minimize, {"dbta"});
	for (auto* s : {sub("find-rotation", "smallest associative binary term over {a, c}", cmd_find_rotation, {"dbta"}),
	                sub("extract", "separator from a walking automaton and two grammars", cmd_extract, {"dtwa", "grammar_g", "grammar_h"})}) {
		s->add_option("--bound", cfg.bound, "largest term size tried")->check(positive);
		s->add_option("--threads", cfg.threads, "worker threads for the search")->check(positive);
	}
	auto* comb_cmd = sub("comb-dfa", "word automaton of the combs of a binary term", cmd_comb_dfa, {"dbta"});
	comb_cmd->add_option("--term", cfg.term, "binary term, e.g. \"a(*,*)\"; searched for when absent");
	comb_cmd->add_option("--bound", cfg.bound, "largest term size tried")->check(positive);
	comb_cmd->add_option("--threads", cfg.threads, "worker threads for the search")->check(positive);
	comb_cmd->add_option("--alphabet", cfg.alphabet, "word letters; default all leaf letters except c");
	sub("verify", "check that a word automaton separates two grammars", cmd_verify, {"dfa", "grammar_g", "grammar_h"});
	sub("encode", "print a tree", cmd_encode, {"tree"})
	    ->add_option("--format", cfg.format, "sexpr or xml")
	    ->check(CLI::IsMember({"sexpr", "xml"}));
	auto* enum_cmd = sub("enumerate", "all trees up to a size", cmd_enumerate, {});
	enum_cmd->add_option("--alphabet", cfg.alphabet, "ranked alphabet")->required();
	enum_cmd->add_option("--max-size", cfg.max_size, "largest tree size")->check(positive);
	enum_cmd->add_option("--format", cfg.format, "sexpr or xml")->check(CLI::IsMember({"sexpr", "xml"}));
	sub("words", "words of a grammar up to a length", cmd_words, {"grammar"})
	    ->add_option("--max-size", cfg.max_size, "longest word")
	    ->check(positive);
	auto* rnd = sub("random-dfa", "seeded random word automaton", cmd_random_dfa, {});
	rnd->add_option("--seed", cfg.seed, "random seed");
	rnd->add_option("--states", cfg.states, "number of states")->check(positive);
	rnd->add_option("--letters", cfg.letters, "word letters");

	try {
		app.parse(argc, argv);
	} catch (const CLI::ParseError& e) {
		int code = app.exit(e);
		return code == 0 ? exit_ok : exit_error;
	}

	try {
		Output out(cfg);
		int code = handler(cfg, out);
		out.flush();
		return code;
	} catch (const std::exception& e) {
		std::cerr << "twsep: " << e.what() << '\n';
	}
	return exit_error;
}
