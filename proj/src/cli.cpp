#include "multclose/cli.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <regex>
#include <sstream>

#include <CLI11.hpp>

#include "multclose/closures.hpp"
#include "multclose/errors.hpp"
#include "multclose/functorial.hpp"
#include "multclose/star_bridge.hpp"
#include "multclose/valuation.hpp"

namespace multclose {

namespace {

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, sep)) out.push_back(trim(cur));
    return out;
}

std::size_t parse_size(const std::string& s, const std::string& what) {
    try {
        std::size_t used = 0;
        long long v = std::stoll(s, &used);
        if (used != s.size() || v < 0) throw std::invalid_argument(s);
        return static_cast<std::size_t>(v);
    } catch (const std::exception&) {
        throw InputError("bad " + what + ": '" + s + "'");
    }
}

FpVec parse_vector(const std::string& s, std::uint32_t p, std::size_t n) {
    std::istringstream in(s);
    std::vector<Residue> coords;
    std::string tok;
    while (in >> tok) {
        std::size_t v = parse_size(tok, "residue");
        if (v >= p) throw InputError("residue " + tok + " is not reduced mod " + std::to_string(p));
        coords.push_back(static_cast<Residue>(v));
    }
    if (coords.size() != n)
        throw InputError("vector '" + trim(s) + "' has " + std::to_string(coords.size()) + " entries, expected " +
                         std::to_string(n));
    return FpVec(p, std::move(coords));
}

}  // namespace

RunConfig parse_config(const std::string& text) {
    RunConfig cfg;
    std::map<std::string, std::string> seen;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos) throw InputError("config line " + std::to_string(lineno) + ": expected key = value");
        std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
        if (seen.count(key)) throw InputError("config key '" + key + "' given twice");
        seen[key] = value;
    }
    for (const auto& [key, value] : seen) {
        if (key == "p") {
            cfg.p = static_cast<std::uint32_t>(parse_size(value, "prime"));
        } else if (key == "factors") {
            static const std::regex factor(R"(\(\s*f\s*=\s*(\d+)\s*,\s*e\s*=\s*(\d+)\s*\))");
            std::string rest = value;
            for (std::smatch m; std::regex_search(rest, m, factor);) {
                if (!trim(m.prefix().str()).empty()) throw InputError("malformed factors: '" + value + "'");
                cfg.factors.emplace_back(parse_size(m[1], "f"), parse_size(m[2], "e"));
                rest = m.suffix().str();
            }
            if (!trim(rest).empty() || cfg.factors.empty()) throw InputError("malformed factors: '" + value + "'");
        } else if (key == "subring") {
            if (value == "prime") {
                cfg.subring_gens.reset();
            } else if (value.rfind("gens:", 0) == 0) {
                cfg.subring_gens = split(value.substr(5), ';');
            } else {
                throw InputError("subring must be 'prime' or 'gens: ...', got '" + value + "'");
            }
        } else if (key == "family") {
            if (value.rfind("custom:", 0) == 0) {
                cfg.family = "custom";
                cfg.custom_members = split(value.substr(7), '|');
            } else {
                cfg.family = value;
            }
        } else {
            throw InputError("unknown config key '" + key + "'");
        }
    }
    if (cfg.factors.empty()) throw InputError("config needs 'factors'");
    if (cfg.p < 2) throw InputError("p must be a prime");
    for (std::uint32_t d = 2; d * d <= cfg.p; ++d)
        if (cfg.p % d == 0) throw InputError("p = " + std::to_string(cfg.p) + " is not prime");
    for (auto [f, e] : cfg.factors)
        if (f == 0 || e == 0) throw InputError("factor degrees f and e must be positive");
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot read config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

ExtensionPtr build_extension(const RunConfig& config) {
    std::vector<FiniteRing> factors;
    for (auto [f, e] : config.factors) factors.push_back(chain_ring(config.p, f, e));
    FiniteRing b = product_ring(factors);
    if (!config.subring_gens) return std::make_shared<const RingExtension>(prime_diagonal_extension(b));
    std::vector<FpVec> gens;
    for (const auto& g : *config.subring_gens)
        if (!g.empty()) gens.push_back(parse_vector(g, b.p(), b.dim()));
    return std::make_shared<const RingExtension>(generated_subring(b, gens));
}

FamilyPtr build_family(const LatticePtr& lattice, const RunConfig& config, const std::optional<std::string>& selector) {
    std::string name = selector ? *selector : config.family.value_or("all");
    if (name == "custom") {
        if (config.custom_members.empty()) throw InputError("custom family needs members in the config");
        std::vector<Subspace> members;
        for (const auto& m : config.custom_members)
            members.push_back(Subspace::deserialize(lattice->ring().p(), lattice->ring().dim(), m));
        return custom_family(lattice, members);
    }
    return make_family(lattice, parse_family_kind(name));
}

// ---------------------------------------------------------------------------

namespace {

struct Globals {
    std::string config;
    std::optional<std::string> family;
    std::size_t max_dim = 0, oracle_max = 0;
    unsigned workers = 0;
    std::string output;
    std::string format = "text";
};

struct Context {
    Globals g;
    Bounds bounds;
    bool tsv() const { return g.format == "tsv"; }

    ExtensionPtr extension() const {
        if (g.config.empty()) throw InputError("--config is required for this command");
        return build_extension(load_config(g.config));
    }
    FamilyPtr family(const LatticePtr& lattice) const {
        return build_family(lattice, load_config(g.config), g.family);
    }
};

std::string join(const std::vector<std::size_t>& v, const char* sep) {
    std::string s;
    for (std::size_t k = 0; k < v.size(); ++k) s += (k ? sep : "") + std::to_string(v[k]);
    return s;
}

void print_ops(std::ostream& out, const std::vector<ClosureOp>& ops, bool count_only, bool tsv) {
    if (count_only) {
        out << ops.size() << '\n';
        return;
    }
    if (tsv) {
        out << "op\tclosed\ttable\n";
        for (std::size_t k = 0; k < ops.size(); ++k)
            out << k << '\t' << join(ops[k].closed_indices(), ",") << '\t' << join(ops[k].table(), ",") << '\n';
        return;
    }
    for (std::size_t k = 0; k < ops.size(); ++k) out << format_op(ops[k], k);
    out << "total " << ops.size() << '\n';
}

void cmd_submodules(const Context& c, std::ostream& out) {
    auto ext = c.extension();
    auto fam = c.family(SubmoduleLattice::build(ext, c.bounds));
    if (c.tsv()) {
        out << format_family(*fam);
        return;
    }
    for (std::size_t k = 0; k < fam->size(); ++k)
        out << k << '\t' << (*fam)[k].rank() << '\t' << (*fam)[k].serialize() << '\t' << ext->ring().format((*fam)[k])
            << '\n';
    const auto& f = fam->flags();
    out << "total " << fam->size() << " (upward closed: " << (f.upward_closed ? "yes" : "no")
        << ", interval: " << (f.interval ? "yes" : "no") << ")\n";
}

void cmd_order(const Context& c, std::ostream& out) {
    auto fam = c.family(SubmoduleLattice::build(c.extension(), c.bounds));
    MultOrder order = mult_order(fam, c.bounds);
    const char* sep = c.tsv() ? "\t" : " ";
    for (std::size_t k = 0; k < order.classes.size(); ++k)
        out << "class" << sep << k << sep << "{" << join(order.classes[k], ", ") << "}\n";
    for (std::size_t a = 0; a < order.classes.size(); ++a)
        for (std::size_t b = 0; b < order.classes.size(); ++b)
            if (a != b && order.class_leq[a].test(b)) out << a << sep << "<" << sep << b << '\n';
}

void cmd_quotient(const Context& c, const std::string& ideal_text, std::ostream& out) {
    auto ext = c.extension();
    Subspace ideal = Subspace::deserialize(ext->p(), ext->dim(), ideal_text);
    auto q = quotient_of(ext, ideal, c.bounds);
    auto fam = c.family(q.source_lattice());
    const Subspace& ker = q.phi().kernel();
    std::vector<std::size_t> keep;
    for (std::size_t k = 0; k < fam->size(); ++k)
        if ((*fam)[k].contains(ker)) keep.push_back(fam->lattice_index(k));
    if (keep.empty()) throw InputError("no member of the family contains the kernel");
    auto sub = std::make_shared<const ModuleFamily>(q.source_lattice(), keep, FamilyKind::CUSTOM);
    auto report = quotient_iso_check(q, sub, c.bounds);
    out << "kernel " << ext->ring().format(ker) << ", " << sub->size() << " members contain it\n";
    for (auto [s, t] : report.pairs) out << "op_" << s << " (source) <-> op_" << t << " (target)\n";
    out << "source " << report.source_count << " ops, target " << report.target_count << " ops: "
        << (report.ok ? "OK" : "FAIL " + report.detail) << '\n';
    if (!report.ok) throw InvariantError("quotient correspondence failed: " + report.detail);
}

std::vector<std::string> merge_negative_values(std::vector<std::string> args) {
    static const char* valued[] = {"--gamma", "--rho", "--lhs", "--rhs", "--ideal"};
    std::vector<std::string> out;
    for (std::size_t k = 0; k < args.size(); ++k) {
        bool takes = std::find(std::begin(valued), std::end(valued), args[k]) != std::end(valued);
        if (takes && k + 1 < args.size() && args[k + 1].size() > 1 && args[k + 1][0] == '-') {
            out.push_back(args[k] + "=" + args[k + 1]);
            ++k;
        } else {
            out.push_back(args[k]);
        }
    }
    return out;
}

}  // namespace

int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Multiplicative closure operations on finite ring extensions", "multclose"};
    app.fallthrough();
    app.require_subcommand(1);
    Context c;
    app.add_option("--config", c.g.config, "extension config file");
    app.add_option("--family", c.g.family, "f0 | all | all-nonzero | ideals | custom");
    app.add_option("--max-dim", c.g.max_dim, "largest ambient F_p-dimension");
    app.add_option("--oracle-max", c.g.oracle_max, "largest family given to the oracle");
    app.add_option("--workers", c.g.workers, "worker threads");
    app.add_option("--output", c.g.output, "write the report to this file");
    app.add_option("--format", c.g.format, "text | tsv")->check(CLI::IsMember({"text", "tsv"}));

    auto* submodules = app.add_subcommand("submodules", "list the members of a family");
    auto* order = app.add_subcommand("order", "multiplicative order classes");
    bool count_only = false;
    auto* enumerate = app.add_subcommand("enumerate", "all multiplicative operations");
    enumerate->add_flag("--count-only", count_only);
    auto* oracle = app.add_subcommand("oracle", "brute-force enumeration");
    oracle->add_flag("--count-only", count_only);
    auto* star = app.add_subcommand("star-count", "operations on F0 closing A");
    auto* fstar = app.add_subcommand("fstar-count", "operations on F0");
    std::size_t n = 0;
    std::uint32_t p = 2;
    auto* cases = app.add_subcommand("cases", "Artinian shapes of length n");
    cases->add_option("--n", n)->required();
    auto* survey_cmd = app.add_subcommand("survey", "counts for every shape of length n");
    survey_cmd->add_option("--n", n)->required();
    survey_cmd->add_option("--p", p);
    std::string what;
    auto* verify = app.add_subcommand("verify", "built-in verifications");
    verify->add_option("what", what)->required()->check(CLI::IsMember({"twoext"}));
    std::string ideal_text;
    auto* quotient = app.add_subcommand("quotient", "pushforward correspondence along B -> B/ideal");
    quotient->add_option("--ideal", ideal_text, "serialized ideal, rows joined by ';'")->required();

    auto* valuation = app.add_subcommand("valuation", "one-dimensional valuation domain model");
    valuation->require_subcommand(1);
    std::string gamma_kind = "dense", lhs, rhs, rho_text, gamma_text = "-inf", ideal_val;
    bool include_zero = false, close_j = false, close_zero = false;
    std::size_t e = 3;
    auto* v_colon = valuation->add_subcommand("colon", "(lhs : rhs)");
    auto* v_order = valuation->add_subcommand("order", "lhs ⪯ rhs");
    for (auto* s : {v_colon, v_order}) {
        s->add_option("--lhs", lhs)->required();
        s->add_option("--rhs", rhs)->required();
    }
    auto* v_classify = valuation->add_subcommand("classify", "families of semiprime operations");
    v_classify->add_flag("--include-zero", include_zero);
    auto* v_eval = valuation->add_subcommand("eval", "closure of one ideal");
    v_eval->add_option("--rho", rho_text)->required();
    v_eval->add_option("--gamma", gamma_text);
    v_eval->add_option("--ideal", ideal_val)->required();
    v_eval->add_flag("--close-j-gamma", close_j);
    v_eval->add_flag("--close-zero", close_zero);
    for (auto* s : {v_colon, v_order, v_classify, v_eval})
        s->add_option("--gamma-kind", gamma_kind, "z | z:<g> | dense | zlocp:<p>");
    auto* v_cross = valuation->add_subcommand("crosscheck", "discrete model against F_p[x]/(x^e)");
    v_cross->add_option("--e", e);
    v_cross->add_option("--p", p);

    std::ostringstream report;
    try {
        args = merge_negative_values(std::move(args));
        std::reverse(args.begin(), args.end());
        app.parse(std::move(args));

        c.bounds = Bounds::from_environment();
        if (c.g.max_dim) c.bounds.max_dim = c.g.max_dim;
        if (c.g.oracle_max) c.bounds.oracle_max = c.g.oracle_max;
        if (c.g.workers) c.bounds.workers = c.g.workers;

        int code = 0;
        if (*submodules) {
            cmd_submodules(c, report);
        } else if (*order) {
            cmd_order(c, report);
        } else if (*enumerate) {
            auto fam = c.family(SubmoduleLattice::build(c.extension(), c.bounds));
            print_ops(report, enumerate_ops(fam, c.bounds), count_only, c.tsv());
        } else if (*oracle) {
            auto fam = c.family(SubmoduleLattice::build(c.extension(), c.bounds));
            std::vector<ClosureOp> ops;
            for (const auto& img : oracle_enumerate(fam, c.bounds)) ops.push_back(ClosureOp::from_map(fam, img));
            print_ops(report, ops, count_only, c.tsv());
        } else if (*star) {
            report << star_count(c.extension(), c.bounds) << '\n';
        } else if (*fstar) {
            report << fstar_count(c.extension(), c.bounds) << '\n';
        } else if (*cases) {
            report << format_cases(structure_cases(n), c.tsv());
        } else if (*survey_cmd) {
            report << format_survey(survey(n, p, c.bounds), c.tsv());
        } else if (*verify) {
            auto r = verify_twoext(c.bounds);
            for (const auto& l : r.lines) report << l << '\n';
            if (!r.ok) code = 3;
        } else if (*quotient) {
            cmd_quotient(c, ideal_text, report);
        } else if (*valuation) {
            if (*v_cross) {
                for (const auto& l : dvr_crosscheck(e, p, c.bounds).lines) report << l << '\n';
            } else {
                ValueGroup g = parse_value_group(gamma_kind);
                if (*v_colon) {
                    ValIdeal a = parse_val_ideal(lhs), b = parse_val_ideal(rhs);
                    report << "(" << normalize(a, g).to_string() << " : " << normalize(b, g).to_string()
                           << ") = " << val_colon(a, b, g).to_string() << '\n';
                } else if (*v_order) {
                    ValIdeal a = parse_val_ideal(lhs), b = parse_val_ideal(rhs);
                    report << normalize(a, g).to_string() << " ⪯ " << normalize(b, g).to_string() << ": "
                           << (val_order(a, b, g) ? "yes" : "no") << '\n';
                } else if (*v_classify) {
                    report << format_classification(g, include_zero);
                } else if (*v_eval) {
                    auto rho = parse_ext_rational(rho_text);
                    ValOp op = make_val_op(g, rho, parse_ext_rational(gamma_text), close_j, close_zero || !rho.is_finite());
                    ValIdeal i = parse_val_ideal(ideal_val);
                    report << op.to_string() << '\n'
                           << normalize(i, g).to_string() << " -> " << val_evaluate(op, i, g).to_string() << '\n';
                }
            }
        }

        if (c.g.output.empty()) {
            out << report.str();
        } else {
            std::ofstream f(c.g.output);
            if (!f) throw InputError("cannot write '" + c.g.output + "'");
            f << report.str();
        }
        return code;
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    } catch (const InputError& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    } catch (const UnsupportedError& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    } catch (const ResourceError& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        err << "error: internal: " << e.what() << '\n';
        return 3;
    }
}

}  // namespace multclose
