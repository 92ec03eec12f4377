#include <CLI11.hpp>

#include <chrono>
#include <thread>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "dgv/closedform.hpp"
#include "dgv/common.hpp"
#include "dgv/constants.hpp"
#include "dgv/lipfree.hpp"
#include "dgv/rng.hpp"
#include "dgv/spaces.hpp"
#include "dgv/sums.hpp"
#include "dgv/threads.hpp"

// Command line front end. Human-readable tables go to standard output,
// machine results to CSV files selected with --out; every numeric answer is
// labeled with the method that produced it. Identical arguments and seed
// reproduce CSV output byte for byte, independent of --threads.

namespace {

using namespace dgv;

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitViolation = 2;

std::string g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string human(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::invalid_argument("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::invalid_argument("cannot write '" + path + "'");
    out << content;
}

Vec parse_point(const std::string& text) {
    Vec out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t pos = 0;
        double v = 0.0;
        try {
            v = std::stod(item, &pos);
        } catch (const std::exception&) {
            throw std::invalid_argument("cannot parse coordinate '" + item + "'");
        }
        while (pos < item.size() && std::isspace(static_cast<unsigned char>(item[pos]))) ++pos;
        if (pos != item.size()) throw std::invalid_argument("cannot parse coordinate '" + item + "'");
        out.push_back(v);
    }
    if (out.empty()) throw std::invalid_argument("empty point");
    return out;
}

// "a=1.5,b=-0.25" -> labeled weights
std::vector<std::pair<std::string, double>> parse_weights(const std::string& text) {
    std::vector<std::pair<std::string, double>> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const std::size_t eq = item.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("expected label=weight, got '" + item + "'");
        std::size_t pos = 0;
        double w = 0.0;
        try {
            w = std::stod(item.substr(eq + 1), &pos);
        } catch (const std::exception&) {
            throw std::invalid_argument("cannot parse weight in '" + item + "'");
        }
        if (pos != item.size() - eq - 1)
            throw std::invalid_argument("cannot parse weight in '" + item + "'");
        out.emplace_back(item.substr(0, eq), w);
    }
    if (out.empty()) throw std::invalid_argument("empty element");
    return out;
}

const char* method_name(con::Method m) {
    switch (m) {
        case con::Method::exact_polyhedral: return "exact";
        case con::Method::sampled: return "sampled";
        case con::Method::closed_form: return "closed_form";
        case con::Method::certificate: return "certificate";
    }
    return "?";
}

const char* side_name(sums::BoundSide s) {
    switch (s) {
        case sums::BoundSide::lower_dc: return "lower_dc";
        case sums::BoundSide::lower_dec: return "lower_dec";
        case sums::BoundSide::upper_dc: return "upper_dc";
        case sums::BoundSide::equality_dec: return "equality_dec";
    }
    return "?";
}

struct Stopwatch {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
};

// RunRecord header: the command line, the seed and the effective search
// configuration. Timing is printed at the end of the run and never enters
// CSV payloads.
void echo_record(int argc, char** argv, std::uint64_t seed, const std::string& config) {
    std::cout << "# command:";
    for (int i = 0; i < argc; ++i) std::cout << ' ' << argv[i];
    std::cout << "\n# seed: " << seed << "\n";
    if (!config.empty()) std::cout << "# config: " << config << "\n";
}

std::string config_echo(const con::SearchConfig& cfg) {
    std::ostringstream os;
    os << "samples=" << cfg.dual_samples << " delta=" << cfg.delta
       << " refine=" << cfg.refine_iters << " threads=" << max_threads();
    return os.str();
}

void print_estimate(const std::string& quantity, const con::ConstantEstimate& e) {
    std::cout << quantity << " = " << human(e.value) << "  [" << method_name(e.method) << "]";
    if (e.method == con::Method::sampled)
        std::cout << "  samples=" << e.samples << " delta=" << e.delta << " seed=" << e.seed;
    if (e.certified_lower) std::cout << "  certified_lower=" << human(*e.certified_lower);
    if (e.upper != e.value) std::cout << "  upper=" << human(e.upper);
    std::cout << "\n";
}

std::string estimate_csv_header() {
    return "quantity,method,value,certified_lower,upper,samples,seed,delta\n";
}

std::string estimate_csv_row(const std::string& quantity, const con::ConstantEstimate& e) {
    std::string row = quantity;
    row += ',';
    row += method_name(e.method);
    row += ',' + g17(e.value);
    row += ',';
    if (e.certified_lower) row += g17(*e.certified_lower);
    row += ',' + g17(e.upper);
    row += ',' + std::to_string(e.samples);
    row += ',' + std::to_string(e.seed);
    row += ',' + g17(e.delta) + '\n';
    return row;
}

// ---------------------------------------------------------------------------
// figures

double figure_value(int which, int n, double t) {
    switch (which) {
        case 1:
            // Daugavet constant along (2/3, 2/3, t) in the max norm
            return cf::dc_linf_n({2.0 / 3.0, 2.0 / 3.0, t});
        case 2: {
            // Delta lower bound along the same path: the ramp profile capped
            // by the per-coordinate floors
            const double ramp = std::min(cf::f_n(2.0 / 3.0, 3), cf::f_n(t, 3));
            return std::max({ramp, 1.0 - 2.0 / 3.0, 1.0 - std::abs(t)});
        }
        case 3:
            // Delta constant of t times the first n unit vectors in c0
            return cf::dec_c0_uniform(t, n);
        default:
            throw std::invalid_argument("figure number must be 1, 2 or 3");
    }
}

std::string figure_csv(int which, int n) {
    std::string csv = "t,value\n";
    for (int i = 0; i <= 100; ++i) {
        const double t = static_cast<double>(i) / 100.0;
        csv += g17(t) + ',' + g17(figure_value(which, n, t)) + '\n';
    }
    return csv;
}

std::string figure_svg(int which, int n) {
    const int w = 640, h = 400, ml = 60, mr = 20, mt = 20, mb = 40;
    std::vector<std::pair<double, double>> pts;
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (int i = 0; i <= 100; ++i) {
        const double t = static_cast<double>(i) / 100.0;
        const double v = figure_value(which, n, t);
        pts.emplace_back(t, v);
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    if (hi - lo < 1e-12) hi = lo + 1.0;
    auto px = [&](double t) { return ml + t * (w - ml - mr); };
    auto py = [&](double v) { return h - mb - (v - lo) / (hi - lo) * (h - mt - mb); };
    char buf[128];
    std::string svg = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"400\" "
                      "viewBox=\"0 0 640 400\">\n";
    std::snprintf(buf, sizeof buf,
                  "<rect x=\"%d\" y=\"%d\" width=\"%d\" height=\"%d\" fill=\"none\" "
                  "stroke=\"black\"/>\n",
                  ml, mt, w - ml - mr, h - mt - mb);
    svg += buf;
    svg += "<polyline fill=\"none\" stroke=\"steelblue\" stroke-width=\"2\" points=\"";
    for (const auto& [t, v] : pts) {
        std::snprintf(buf, sizeof buf, "%.6g,%.6g ", px(t), py(v));
        svg += buf;
    }
    svg += "\"/>\n";
    std::snprintf(buf, sizeof buf,
                  "<text x=\"%d\" y=\"%d\" font-size=\"12\">t=0</text>\n", ml - 10, h - mb + 16);
    svg += buf;
    std::snprintf(buf, sizeof buf,
                  "<text x=\"%d\" y=\"%d\" font-size=\"12\">t=1</text>\n", w - mr - 20, h - mb + 16);
    svg += buf;
    std::snprintf(buf, sizeof buf, "<text x=\"%d\" y=\"%d\" font-size=\"12\">%.4g</text>\n", 8,
                  static_cast<int>(py(lo)) + 4, lo);
    svg += buf;
    std::snprintf(buf, sizeof buf, "<text x=\"%d\" y=\"%d\" font-size=\"12\">%.4g</text>\n", 8,
                  static_cast<int>(py(hi)) + 4, hi);
    svg += buf;
    svg += "</svg>\n";
    return svg;
}

// ---------------------------------------------------------------------------
// subcommand runners

struct CommonOpts {
    std::string space_file, point_text, out_file;
    std::string method = "sampled";
    con::SearchConfig cfg;
};

int run_dc_dec(bool daugavet, const CommonOpts& o) {
    const auto space = spaces::space_from_json(read_file(o.space_file));
    const Vec x = parse_point(o.point_text);
    if (static_cast<int>(x.size()) != space.dim())
        throw std::invalid_argument("point has " + std::to_string(x.size()) +
                                    " coordinates, space has dimension " +
                                    std::to_string(space.dim()));
    const std::string quantity = daugavet ? "dc" : "dec";
    std::vector<con::ConstantEstimate> results;
    if (o.method == "exact" || o.method == "both") {
        if (!daugavet)
            throw std::invalid_argument("the Delta constant has no exact evaluator; use --method sampled");
        if (!space.has_vertex_list()) {
            if (o.method == "exact")
                throw std::invalid_argument("exact method needs an enumerable ball; this space has none");
        } else {
            results.push_back(con::dc_exact_polyhedral(space, x));
        }
    }
    if (o.method == "sampled" || o.method == "both") {
        results.push_back(daugavet ? con::dc_sampled(space, x, o.cfg)
                                   : con::dec_sampled(space, x, o.cfg));
    }
    if (o.method != "exact" && o.method != "sampled" && o.method != "both")
        throw std::invalid_argument("unknown method '" + o.method + "'");

    std::cout << space.describe() << "\n";
    std::string csv = estimate_csv_header();
    for (const auto& e : results) {
        print_estimate(quantity, e);
        csv += estimate_csv_row(quantity, e);
    }
    if (!o.out_file.empty()) write_file(o.out_file, csv);
    return kExitOk;
}

int run_certify(const std::string& what, const CommonOpts& o, double alpha, double eps) {
    const auto space = spaces::space_from_json(read_file(o.space_file));
    const Vec x = parse_point(o.point_text);
    if (static_cast<int>(x.size()) != space.dim())
        throw std::invalid_argument("point dimension mismatch");
    con::HullCertificate cert;
    if (what == "dc")
        cert = con::dc_lower_certificate(space, x, alpha, eps, o.cfg);
    else if (what == "dec")
        cert = con::dec_lower_certificate(space, x, alpha, eps, o.cfg);
    else
        throw std::invalid_argument("certify --what must be dc or dec");

    std::cout << space.describe() << "\n";
    std::cout << what << " >= " << human(alpha - eps) << " : "
              << (cert.certified ? "certified" : "not certified at this resolution")
              << "  [certificate]  alpha=" << human(cert.alpha) << " eps=" << human(cert.eps)
              << " witnesses=" << cert.witnesses.size() << " targets=" << cert.targets << "\n";
    if (!o.out_file.empty()) {
        std::string csv = "quantity,alpha,eps,certified,witnesses,targets\n";
        csv += what + ',' + g17(cert.alpha) + ',' + g17(cert.eps) + ',' +
               (cert.certified ? "1" : "0") + ',' + std::to_string(cert.witnesses.size()) + ',' +
               std::to_string(cert.targets) + '\n';
        write_file(o.out_file, csv);
    }
    return kExitOk;
}

int run_index(const std::string& kind_text, const CommonOpts& o) {
    const auto space = spaces::space_from_json(read_file(o.space_file));
    con::ThicknessKind kind;
    if (kind_text == "ts")
        kind = con::ThicknessKind::ts;
    else if (kind_text == "tdelta")
        kind = con::ThicknessKind::tdelta;
    else if (kind_text == "sup_dc")
        kind = con::ThicknessKind::sup_dc;
    else
        throw std::invalid_argument("index --kind must be ts, tdelta or sup_dc");
    const auto e = con::thickness_index(space, kind, o.cfg);
    std::cout << space.describe() << "\n";
    print_estimate(kind_text, e);
    if (!o.out_file.empty()) write_file(o.out_file, estimate_csv_header() + estimate_csv_row(kind_text, e));
    return kExitOk;
}

int run_operator_check(const CommonOpts& o, const std::string& functional_text) {
    const auto space = spaces::space_from_json(read_file(o.space_file));
    const Vec x = parse_point(o.point_text);
    const Vec xstar = parse_point(functional_text);
    if (static_cast<int>(x.size()) != space.dim() || static_cast<int>(xstar.size()) != space.dim())
        throw std::invalid_argument("point or functional dimension mismatch");
    const auto chk = con::operator_inequality_check(space, x, xstar);
    std::cout << space.describe() << "\n";
    std::cout << "||Id + T|| = " << human(chk.lhs_T) << "  vs  (dc(x)-1)||x*||+1 = "
              << human(chk.rhs_T) << "\n";
    if (chk.part_b_applicable)
        std::cout << "||Id - P|| = " << human(chk.lhs_P) << "  vs  dec(x) = " << human(chk.rhs_P)
                  << "\n";
    else
        std::cout << "projection inequality skipped: x*(x) != 1\n";
    std::cout << (chk.pass ? "pass" : "VIOLATION") << "\n";
    if (!o.out_file.empty()) {
        std::string csv = "lhs_T,rhs_T,lhs_P,rhs_P,part_b_applicable,pass\n";
        csv += g17(chk.lhs_T) + ',' + g17(chk.rhs_T) + ',' + g17(chk.lhs_P) + ',' +
               g17(chk.rhs_P) + ',' + (chk.part_b_applicable ? "1" : "0") + ',' +
               (chk.pass ? "1" : "0") + '\n';
        write_file(o.out_file, csv);
    }
    return chk.pass ? kExitOk : kExitViolation;
}

con::ConstantEstimate component_dc(const spaces::NormedSpace& comp, const Vec& unit,
                                   const con::SearchConfig& cfg) {
    if (comp.has_vertex_list()) return con::dc_exact_polyhedral(comp, unit);
    return con::dc_sampled(comp, unit, cfg);
}

int run_sum_bounds(const CommonOpts& o) {
    const auto space = spaces::space_from_json(read_file(o.space_file));
    if (space.kind() != spaces::SpaceKind::sum)
        throw std::invalid_argument("sum-bounds needs a sum space");
    Vec z = parse_point(o.point_text);
    if (static_cast<int>(z.size()) != space.dim())
        throw std::invalid_argument("point dimension mismatch");
    const double nz = space.norm(z);
    if (nz <= 1e-12) throw std::invalid_argument("cannot normalize the zero point");
    for (double& c : z) c /= nz;

    const auto& left = space.left();
    const auto& right = space.right();
    const auto& profile = space.profile();
    const int dl = left.dim();
    Vec zx(z.begin(), z.begin() + dl), zy(z.begin() + dl, z.end());
    const double a = left.norm(zx), b = right.norm(zy);
    Vec ux = zx, uy = zy;
    if (a > 1e-12)
        for (double& c : ux) c /= a;
    if (b > 1e-12)
        for (double& c : uy) c /= b;

    con::SearchConfig ccfg = o.cfg;
    const double dcx = a > 1e-12 ? component_dc(left, ux, ccfg).value : 0.0;
    const double dcy = b > 1e-12 ? component_dc(right, uy, ccfg).value : 0.0;
    const double decx = a > 1e-12 ? con::dec_sampled(left, ux, ccfg).value : 0.0;
    const double decy = b > 1e-12 ? con::dec_sampled(right, uy, ccfg).value : 0.0;

    auto entries = sums::dc_sum_lower_bounds(left, right, profile, zx, zy, dcx, dcy);
    const auto dec_entries = sums::dec_sum_lower_bounds(left, right, profile, a, b, ux, uy, decx, decy);
    entries.insert(entries.end(), dec_entries.begin(), dec_entries.end());
    sums::BoundEntry upper;
    upper.rule = "extreme_upper";
    upper.side = sums::BoundSide::upper_dc;
    if (a <= 1e-12 || b <= 1e-12) {
        const auto cap = sums::dc_sum_upper(
            profile, a > b ? sums::UnitSide::left_unit : sums::UnitSide::right_unit);
        if (cap) {
            upper.applicable = true;
            upper.bound = *cap;
        } else {
            upper.note = "opposite axis point is not extreme";
        }
    } else {
        upper.note = "needs a one-component point";
    }
    entries.push_back(upper);

    std::cout << space.describe() << "\n";
    std::cout << "normalized point split: a=" << human(a) << " b=" << human(b) << "\n";
    std::cout << "component constants [" << (left.has_vertex_list() ? "exact" : "sampled")
              << "/sampled]: dc_x=" << human(dcx) << " dec_x=" << human(decx)
              << " dc_y=" << human(dcy) << " dec_y=" << human(decy) << "\n";
    std::string csv = "rule,side,applicable,bound,note\n";
    for (const auto& e : entries) {
        std::cout << "  " << e.rule << " [" << side_name(e.side) << "] ";
        if (e.applicable)
            std::cout << "bound=" << human(e.bound);
        else
            std::cout << "inapplicable: " << e.note;
        std::cout << "\n";
        csv += e.rule;
        csv += ',';
        csv += side_name(e.side);
        csv += ',';
        csv += e.applicable ? "1" : "0";
        csv += ',' + g17(e.bound) + ',' + csv_escape(e.note) + '\n';
    }
    if (!o.out_file.empty()) write_file(o.out_file, csv);
    return kExitOk;
}

int run_figure(int which, int n, const std::string& out_file, const std::string& svg_file) {
    if (which < 1 || which > 3) throw std::invalid_argument("figure number must be 1, 2 or 3");
    if (n < 2) throw std::invalid_argument("--n must be at least 2");
    const std::string csv = figure_csv(which, n);
    std::cout << "figure " << which << (which == 3 ? " (n=" + std::to_string(n) + ")" : "")
              << ", 101 grid points  [closed_form]\n";
    for (int i : {0, 25, 50, 75, 100}) {
        const double t = static_cast<double>(i) / 100.0;
        std::cout << "  t=" << human(t) << "  value=" << human(figure_value(which, n, t)) << "\n";
    }
    if (!out_file.empty()) write_file(out_file, csv);
    if (!svg_file.empty()) write_file(svg_file, figure_svg(which, n));
    return kExitOk;
}

// lipfree subcommands -------------------------------------------------------

lip::FreeElement element_from_opts(const lip::FiniteMetricSpace& m, const std::string& element_text,
                                   const std::string& pair_text) {
    if (!element_text.empty() && !pair_text.empty())
        throw std::invalid_argument("give either --element or --pair, not both");
    if (!element_text.empty())
        return lip::FreeElement::from_support(m, parse_weights(element_text));
    if (!pair_text.empty()) {
        const std::size_t comma = pair_text.find(',');
        if (comma == std::string::npos)
            throw std::invalid_argument("--pair expects 'u,v'");
        return lip::molecule(m, pair_text.substr(0, comma), pair_text.substr(comma + 1)).element;
    }
    throw std::invalid_argument("needs --element label=weight,... or --pair u,v");
}

int run_lipfree_norm(const std::string& space_file, const std::string& element_text,
                     const std::string& pair_text, const std::string& out_file) {
    const auto m = lip::metric_from_json(read_file(space_file));
    const auto mu = element_from_opts(m, element_text, pair_text);
    const auto got = lip::free_norm_detail(m, mu);
    std::cout << "free space over " << m.size() << " points, base '" << m.label(m.base())
              << "'\n";
    std::cout << "free norm = " << human(got.value) << "  [exact]\n";
    std::cout << "norming function:\n";
    std::string csv = "label,weight,function\n";
    for (int i = 0; i < m.size(); ++i) {
        double w = 0.0;
        for (const auto& [p, wp] : mu.support())
            if (p == i) w = wp;
        std::cout << "  " << m.label(i) << ": f=" << human(got.function[static_cast<std::size_t>(i)])
                  << (w != 0.0 ? "  weight=" + human(w) : "") << "\n";
        csv += csv_escape(m.label(i)) + ',' + g17(w) + ',' +
               g17(got.function[static_cast<std::size_t>(i)]) + '\n';
    }
    if (!out_file.empty()) write_file(out_file, csv);
    return kExitOk;
}

std::string ladder_csv(const std::vector<lip::LadderRow>& rows) {
    std::string csv = "n,distance,bound_4_over_n,denting,delta_cert\n";
    for (const auto& r : rows)
        csv += std::to_string(r.n) + ',' + g17(r.distance) + ',' + g17(r.bound) + ',' +
               (r.denting ? "1" : "0") + ',' + g17(r.delta_cert) + '\n';
    return csv;
}

int run_lipfree_ladder(int rungs, int grid_k, const std::string& out_file) {
    const auto rows = lip::ladder_experiment(rungs, grid_k);
    std::cout << "ladder with " << rungs << " rungs, segment grid " << grid_k << "  [exact]\n";
    std::cout << "Delta certificate for m_{x,y}: " << human(rows.front().delta_cert) << "\n";
    for (const auto& r : rows)
        std::cout << "  n=" << r.n << "  distance=" << human(r.distance)
                  << "  bound=" << human(r.bound) << "  denting=" << (r.denting ? "yes" : "no")
                  << "\n";
    if (!out_file.empty()) write_file(out_file, ladder_csv(rows));
    return kExitOk;
}

int run_lipfree_check(const std::string& space_file, const std::string& element_text,
                      const std::string& pair_text, double alpha, const std::string& out_file) {
    const auto m = lip::metric_from_json(read_file(space_file));
    const auto mu = element_from_opts(m, element_text, pair_text);
    const auto rep = lip::check_dc_characterization(m, mu, alpha);
    std::cout << "free space over " << m.size() << " points\n";
    std::cout << "claim dc(mu) >= " << human(alpha) << ": "
              << (rep.consistent ? "consistent" : "VIOLATED") << "  [certificate]\n";
    std::cout << "largest consistent level: " << human(rep.alpha_upper) << "\n";
    std::cout << "denting checks: " << rep.denting_checks
              << ", coverage checks: " << rep.coverage_checks << "\n";
    for (const auto& v : rep.violations) std::cout << "  " << v << "\n";
    if (!out_file.empty()) {
        std::string csv = "alpha,consistent,alpha_upper,denting_checks,coverage_checks,violations\n";
        csv += g17(rep.alpha) + ',' + (rep.consistent ? "1" : "0") + ',' + g17(rep.alpha_upper) +
               ',' + std::to_string(rep.denting_checks) + ',' +
               std::to_string(rep.coverage_checks) + ',' +
               std::to_string(rep.violations.size()) + '\n';
        write_file(out_file, csv);
    }
    return rep.consistent ? kExitOk : kExitViolation;
}

// verify suites -------------------------------------------------------------

struct SuiteResult {
    int checks = 0;
    int violations = 0;
};

void suite_row(std::string& csv, SuiteResult& r, const std::string& check,
               const std::string& instance, double expected, double got, bool pass) {
    csv += check + ',' + instance + ',' + g17(expected) + ',' + g17(got) + ',' +
           (pass ? "1" : "0") + '\n';
    r.checks += 1;
    if (!pass) r.violations += 1;
}

SuiteResult verify_closedform(std::uint64_t seed, const con::SearchConfig& cfg,
                              const std::string& path) {
    std::string csv = "check,instance,expected,got,pass\n";
    SuiteResult res;
    const auto linf3 = spaces::NormedSpace::lp(std::numeric_limits<double>::infinity(), 3);
    const auto l13 = spaces::NormedSpace::lp(1.0, 3);
    const auto l23 = spaces::NormedSpace::lp(2.0, 3);

    // max-norm parity: exact evaluator against the closed form, sampled
    // estimator against both
    Rng rng(derive_seed(seed, 0xC10F));
    for (int i = 0; i < 50; ++i) {
        const Vec x = {rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
        const double formula = cf::dc_linf_n(x);
        const double exact = con::dc_exact_polyhedral(linf3, x).value;
        suite_row(csv, res, "linf3_dc_exact", std::to_string(i), formula, exact,
                  std::abs(exact - formula) <= 1e-9);
        con::SearchConfig c = cfg;
        c.seed = derive_seed(seed, 0x51D0 + i);
        const double sampled = con::dc_sampled(linf3, x, c).value;
        suite_row(csv, res, "linf3_dc_sampled", std::to_string(i), formula, sampled,
                  std::abs(sampled - formula) <= 0.05);
    }

    // figure grids against their formulas
    for (int which = 1; which <= 3; ++which)
        for (int i = 0; i <= 100; ++i) {
            const double t = static_cast<double>(i) / 100.0;
            double expected = 0.0;
            if (which == 1) {
                expected = std::max({1.0 - 2.0 / 3.0, 1.0 - 2.0 / 3.0, 1.0 - t});
            } else if (which == 2) {
                const auto ramp = [](double s) {
                    return std::abs(s) <= 1.0 / 3.0 ? 1.0 + std::abs(s) : 2.0 * (1.0 - std::abs(s));
                };
                expected = std::max({std::min(ramp(2.0 / 3.0), ramp(t)), 1.0 / 3.0, 1.0 - t});
            } else {
                expected = std::min(1.0 + t, std::max(1.0, (1.0 - t) * 2.0));
            }
            const double got = figure_value(which, 3, t);
            suite_row(csv, res, "figure" + std::to_string(which), std::to_string(i), expected, got,
                      std::abs(got - expected) <= 1e-12);
        }

    // l1 parity: both constants against 1 + ||x|| - 2 max |x_i|, plus the
    // hull certificate two notches below the closed form
    Rng l1rng(derive_seed(seed, 0xC1F1));
    for (int i = 0; i < 50; ++i) {
        Vec x = {l1rng.uniform(-1.0, 1.0), l1rng.uniform(-1.0, 1.0), l1rng.uniform(-1.0, 1.0)};
        const double n1 = std::abs(x[0]) + std::abs(x[1]) + std::abs(x[2]);
        if (n1 > 1.0)
            for (double& c : x) c /= n1;
        const double formula = cf::dc_weighted_l1(x, {1.0, 1.0, 1.0});
        con::SearchConfig c = cfg;
        c.seed = derive_seed(seed, 0x11D0 + i);
        const double dec = con::dec_sampled(l13, x, c).value;
        const double dc = con::dc_sampled(l13, x, c).value;
        suite_row(csv, res, "l13_dec_sampled", std::to_string(i), formula, dec,
                  std::abs(dec - formula) <= 0.05);
        suite_row(csv, res, "l13_dc_sampled", std::to_string(i), formula, dc,
                  std::abs(dc - formula) <= 0.05);
        const auto cert = con::dec_lower_certificate(l13, x, formula - 0.02, 1e-3, c);
        suite_row(csv, res, "l13_dec_certificate", std::to_string(i), formula - 0.02,
                  cert.certified ? formula - 0.02 : 0.0, cert.certified);
    }

    // Euclidean parity: dec against sqrt(1 - ||x||^2), dc against 1 - ||x||
    Rng hrng(derive_seed(seed, 0xC1F2));
    for (int i = 0; i < 50; ++i) {
        Vec x = hrng.gauss_vec(3);
        const double scale = hrng.uniform() / std::max(norm_2(x), 1e-12);
        for (double& c : x) c *= scale;
        con::SearchConfig c = cfg;
        c.delta = 1e-5;
        c.seed = derive_seed(seed, 0x21D0 + i);
        const double dec = con::dec_sampled(l23, x, c).value;
        const double dc = con::dc_sampled(l23, x, c).value;
        const double dec_formula = cf::dec_hilbert(x).value;
        const double dc_formula = cf::dc_lur(x);
        suite_row(csv, res, "l23_dec_sampled", std::to_string(i), dec_formula, dec,
                  std::abs(dec - dec_formula) <= 0.02);
        suite_row(csv, res, "l23_dc_sampled", std::to_string(i), dc_formula, dc,
                  std::abs(dc - dc_formula) <= 0.02);
    }

    write_file(path, csv);
    return res;
}

SuiteResult verify_stability(std::uint64_t seed, const std::string& path) {
    std::string csv = "pair,trial,rule,side,applicable,bound,brute_dc,brute_dec,findings\n";
    SuiteResult res;
    const auto linf2 = spaces::NormedSpace::lp(std::numeric_limits<double>::infinity(), 2);
    const auto l12 = spaces::NormedSpace::lp(1.0, 2);

    struct PairSpec {
        const char* name;
        const spaces::NormedSpace* left;
        const spaces::NormedSpace* right;
        spaces::AbsoluteNormProfile profile;
        con::SearchConfig cfg;
    };
    con::SearchConfig poly;
    poly.dual_samples = 600;
    poly.refine_iters = 60;
    con::SearchConfig smooth;
    smooth.dual_samples = 400;
    smooth.refine_iters = 48;
    const std::vector<PairSpec> specs = {
        {"linf2_plus1_l12", &linf2, &l12, spaces::AbsoluteNormProfile::l1(), poly},
        {"l12_plusinf_linf2", &l12, &linf2, spaces::AbsoluteNormProfile::linf(), poly},
        {"linf2_plus2_l12", &linf2, &l12, spaces::AbsoluteNormProfile::lp(2.0), smooth},
    };
    int salt = 0;
    for (const auto& spec : specs) {
        con::SearchConfig cfg = spec.cfg;
        cfg.seed = derive_seed(seed, 0x57A0 + salt++);
        const auto reports = sums::verify_stability(*spec.left, *spec.right, spec.profile, 50, cfg);
        for (std::size_t t = 0; t < reports.size(); ++t) {
            const auto& rep = reports[t];
            for (const auto& e : rep.entries) {
                csv += std::string(spec.name) + ',' + std::to_string(t) + ',' + e.rule + ',' +
                       side_name(e.side) + ',' + (e.applicable ? "1" : "0") + ',' + g17(e.bound) +
                       ',' + g17(rep.brute_dc.value) + ',' + g17(rep.brute_dec.value) + ',' +
                       std::to_string(rep.findings.size()) + '\n';
            }
            res.checks += 1;
            if (!rep.findings.empty()) res.violations += 1;
        }
    }
    write_file(path, csv);
    return res;
}

SuiteResult verify_operators(std::uint64_t seed, const std::string& path) {
    std::string csv = "space,instance,lhs_T,rhs_T,lhs_P,rhs_P,part_b,pass\n";
    SuiteResult res;
    const auto linf3 = spaces::NormedSpace::lp(std::numeric_limits<double>::infinity(), 3);
    const auto l13 = spaces::NormedSpace::lp(1.0, 3);
    const std::pair<const char*, const spaces::NormedSpace*> spaces_list[] = {{"linf3", &linf3},
                                                                              {"l13", &l13}};
    for (const auto& [name, space] : spaces_list) {
        Rng rng(derive_seed(seed, name[1] == 'i' ? 0x0B01 : 0x0B02));
        for (int i = 0; i < 100; ++i) {
            Vec x = rng.gauss_vec(3);
            const double scale = rng.uniform() / std::max(space->norm(x), 1e-12);
            for (double& c : x) c *= scale;
            Vec xstar = rng.gauss_vec(3);
            const double ns = space->dual_norm(xstar);
            for (double& c : xstar) c /= std::max(ns, 1e-12);
            const double px = dot(xstar, x);
            // every other instance rescales to x*(x) = 1 to engage the
            // projection inequality; |x*(x)| <= ||x|| <= 1 keeps the dual
            // norm at least 1 afterwards
            if (i % 2 == 1 && std::abs(px) > 0.1)
                for (double& c : xstar) c /= px;
            const auto chk = con::operator_inequality_check(*space, x, xstar);
            csv += std::string(name) + ',' + std::to_string(i) + ',' + g17(chk.lhs_T) + ',' +
                   g17(chk.rhs_T) + ',' + g17(chk.lhs_P) + ',' + g17(chk.rhs_P) + ',' +
                   (chk.part_b_applicable ? "1" : "0") + ',' + (chk.pass ? "1" : "0") + '\n';
            res.checks += 1;
            if (!chk.pass) res.violations += 1;
        }
    }
    write_file(path, csv);
    return res;
}

SuiteResult verify_lipfree(std::uint64_t seed, const std::string& path) {
    std::string csv = "check,instance,value,reference,pass\n";
    SuiteResult res;

    // random planar spaces: molecule norms, pair formula agreement, distance
    // bounds
    Rng rng(derive_seed(seed, 0x11BF));
    int bound_checks = 0;
    for (int s = 0; s < 20; ++s) {
        const int n = 4 + static_cast<int>(rng.index(3));
        lip::FiniteMetricSpace m = [&] {
            for (;;) {
                std::vector<std::pair<double, double>> pts;
                for (int i = 0; i < n; ++i)
                    pts.emplace_back(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0));
                double closest = std::numeric_limits<double>::infinity();
                for (int i = 0; i < n; ++i)
                    for (int j = i + 1; j < n; ++j)
                        closest = std::min(closest,
                                           std::hypot(pts[static_cast<std::size_t>(i)].first -
                                                          pts[static_cast<std::size_t>(j)].first,
                                                      pts[static_cast<std::size_t>(i)].second -
                                                          pts[static_cast<std::size_t>(j)].second));
                if (closest < 1e-2) continue;
                std::vector<std::string> labels;
                std::vector<Vec> dist(static_cast<std::size_t>(n),
                                      Vec(static_cast<std::size_t>(n), 0.0));
                for (int i = 0; i < n; ++i) labels.push_back("p" + std::to_string(i));
                for (int i = 0; i < n; ++i)
                    for (int j = 0; j < n; ++j)
                        dist[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
                            std::hypot(pts[static_cast<std::size_t>(i)].first -
                                           pts[static_cast<std::size_t>(j)].first,
                                       pts[static_cast<std::size_t>(i)].second -
                                           pts[static_cast<std::size_t>(j)].second);
                return lip::FiniteMetricSpace::make(labels, "p0", dist);
            }
        }();
        for (int i = 0; i < m.size(); ++i)
            for (int j = 0; j < m.size(); ++j) {
                if (i == j) continue;
                const double nm = lip::free_norm(m, lip::molecule(m, m.label(i), m.label(j)).element);
                suite_row(csv, res, "molecule_norm",
                          std::to_string(s) + "/" + m.label(i) + "-" + m.label(j), 1.0, nm,
                          std::abs(nm - 1.0) <= 1e-9);
            }
        for (int rep = 0; rep < 6; ++rep) {
            const auto pick = [&] {
                for (;;) {
                    const int a = static_cast<int>(rng.index(static_cast<std::size_t>(m.size())));
                    const int b = static_cast<int>(rng.index(static_cast<std::size_t>(m.size())));
                    if (a != b) return std::pair<int, int>{a, b};
                }
            };
            const auto [x, y] = pick();
            const auto [u, v] = pick();
            const auto pr = lip::molecule_pair_norm(m, {m.label(x), m.label(y)},
                                                    {m.label(u), m.label(v)});
            if (pr.formula_applies)
                suite_row(csv, res, "pair_formula", std::to_string(s) + "/" + std::to_string(rep),
                          pr.closed_form, pr.value, std::abs(pr.value - pr.closed_form) <= 1e-7);
            const auto db = lip::molecule_distance_bound(m, {m.label(u), m.label(v)},
                                                         {m.label(x), m.label(y)});
            suite_row(csv, res, "distance_bound", std::to_string(s) + "/" + std::to_string(rep),
                      db.rhs, db.lhs, db.pass);
            ++bound_checks;
        }
    }
    (void)bound_checks;

    // the full-size ladder
    const auto rows = lip::ladder_experiment(20, 8);
    for (const auto& r : rows) {
        suite_row(csv, res, "ladder_distance", std::to_string(r.n), r.bound, r.distance,
                  r.distance <= r.bound + 1e-9);
        suite_row(csv, res, "ladder_denting", std::to_string(r.n), 1.0, r.denting ? 1.0 : 0.0,
                  r.denting);
    }
    suite_row(csv, res, "delta_certificate", "ladder", 2.0 - 2.0 / 8 - 0.01,
              rows.front().delta_cert, rows.front().delta_cert >= 2.0 - 2.0 / 8 - 0.01);

    write_file(path, csv);
    return res;
}

int run_verify(const std::string& suite, std::uint64_t seed, const con::SearchConfig& cfg,
               const std::string& out_dir) {
    std::filesystem::create_directories(out_dir);
    const bool all = suite == "all";
    int checks = 0, violations = 0;
    auto account = [&](const char* name, const SuiteResult& r) {
        std::cout << name << ": " << r.checks << " checks, " << r.violations << " violations\n";
        checks += r.checks;
        violations += r.violations;
    };
    if (all || suite == "closedform")
        account("closedform", verify_closedform(seed, cfg, out_dir + "/closedform.csv"));
    if (all || suite == "stability")
        account("stability", verify_stability(seed, out_dir + "/stability.csv"));
    if (all || suite == "operators")
        account("operators", verify_operators(seed, out_dir + "/operators.csv"));
    if (all || suite == "lipfree")
        account("lipfree", verify_lipfree(seed, out_dir + "/lipfree.csv"));
    std::cout << "total: " << checks << " checks, " << violations << " violations\n";
    return violations == 0 ? kExitOk : kExitViolation;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Daugavet and Delta constants: computation, certificates, experiments"};
    app.require_subcommand(1);

    CommonOpts o;
    int threads = 0;
    double alpha = 0.0, eps = 1e-3;
    std::string what = "dec", kind, functional_text, element_text, pair_text;
    std::string suite = "all", out_dir = "verify_out", svg_file;
    int fig_which = 0, fig_n = 3, rungs = 20, grid_k = 8;

    auto add_search_opts = [&](CLI::App* sc) {
        sc->add_option("--samples", o.cfg.dual_samples, "dual functional sample count")
            ->check(CLI::PositiveNumber);
        sc->add_option("--delta", o.cfg.delta, "slice width on smooth spaces")
            ->check(CLI::PositiveNumber);
        sc->add_option("--seed", o.cfg.seed, "random seed");
        sc->add_option("--threads", threads, "worker thread cap")->check(CLI::PositiveNumber);
    };

    auto* show = app.add_subcommand("space-show", "describe a space file");
    show->add_option("--space", o.space_file, "space JSON file")->required();

    auto* dc = app.add_subcommand("dc", "Daugavet constant of a point");
    dc->add_option("--space", o.space_file, "space JSON file")->required();
    dc->add_option("--point", o.point_text, "comma separated coordinates")->required();
    dc->add_option("--method", o.method, "exact, sampled or both");
    dc->add_option("--out", o.out_file, "CSV output file");
    add_search_opts(dc);

    auto* dec = app.add_subcommand("dec", "Delta constant of a point");
    dec->add_option("--space", o.space_file, "space JSON file")->required();
    dec->add_option("--point", o.point_text, "comma separated coordinates")->required();
    dec->add_option("--method", o.method, "sampled");
    dec->add_option("--out", o.out_file, "CSV output file");
    add_search_opts(dec);

    auto* cert = app.add_subcommand("certify", "certified lower bound via far-point hulls");
    cert->add_option("--space", o.space_file, "space JSON file")->required();
    cert->add_option("--point", o.point_text, "comma separated coordinates")->required();
    cert->add_option("--what", what, "dc or dec");
    cert->add_option("--alpha", alpha, "level to certify")->required();
    cert->add_option("--eps", eps, "certificate slack");
    cert->add_option("--out", o.out_file, "CSV output file");
    add_search_opts(cert);

    auto* index = app.add_subcommand("index", "thickness index over the unit sphere");
    index->add_option("--space", o.space_file, "space JSON file")->required();
    index->add_option("--kind", kind, "ts, tdelta or sup_dc")->required();
    index->add_option("--out", o.out_file, "CSV output file");
    add_search_opts(index);

    auto* opchk = app.add_subcommand("operator-check", "rank-one operator norm inequalities");
    opchk->add_option("--space", o.space_file, "space JSON file")->required();
    opchk->add_option("--point", o.point_text, "comma separated coordinates")->required();
    opchk->add_option("--functional", functional_text, "comma separated dual coordinates")
        ->required();
    opchk->add_option("--out", o.out_file, "CSV output file");
    add_search_opts(opchk);

    auto* sb = app.add_subcommand("sum-bounds", "stability bounds on a sum space");
    sb->add_option("--space", o.space_file, "sum space JSON file")->required();
    sb->add_option("--point", o.point_text, "comma separated coordinates")->required();
    sb->add_option("--out", o.out_file, "CSV output file");
    add_search_opts(sb);

    auto* fig = app.add_subcommand("figure", "closed-form constant graphs as CSV");
    fig->add_option("number", fig_which, "1, 2 or 3")->required();
    fig->add_option("--n", fig_n, "coordinate count for figure 3");
    fig->add_option("--out", o.out_file, "CSV output file");
    fig->add_option("--svg", svg_file, "SVG rendering output file");

    auto* lip_cmd = app.add_subcommand("lipfree", "Lipschitz-free space computations");
    lip_cmd->require_subcommand(1);
    auto* lnorm = lip_cmd->add_subcommand("norm", "free norm of an element");
    lnorm->add_option("--space", o.space_file, "metric space JSON file")->required();
    lnorm->add_option("--element", element_text, "label=weight,... support list");
    lnorm->add_option("--pair", pair_text, "u,v molecule");
    lnorm->add_option("--out", o.out_file, "CSV output file");
    auto* lladder = lip_cmd->add_subcommand("ladder", "truncated ladder experiment");
    lladder->add_option("--rungs", rungs, "number of rungs")->check(CLI::PositiveNumber);
    lladder->add_option("--grid", grid_k, "segment grid count")->check(CLI::PositiveNumber);
    lladder->add_option("--out", o.out_file, "CSV output file");
    auto* lcheck = lip_cmd->add_subcommand("check", "slice characterization instances");
    lcheck->add_option("--space", o.space_file, "metric space JSON file")->required();
    lcheck->add_option("--element", element_text, "label=weight,... support list");
    lcheck->add_option("--pair", pair_text, "u,v molecule");
    lcheck->add_option("--alpha", alpha, "claimed dc level")->required();
    lcheck->add_option("--out", o.out_file, "CSV output file");

    auto* verify = app.add_subcommand("verify", "verification suites with CSV reports");
    verify->add_option("--suite", suite, "closedform, stability, operators, lipfree or all")
        ->check(CLI::IsMember({"closedform", "stability", "operators", "lipfree", "all"}));
    verify->add_option("--seed", o.cfg.seed, "random seed");
    verify->add_option("--out", out_dir, "report directory");
    verify->add_option("--threads", threads, "worker thread cap")->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitInput;
    }

    set_max_threads(threads > 0 ? threads
                                : static_cast<int>(std::thread::hardware_concurrency()));

    Stopwatch watch;
    int code = kExitOk;
    try {
        echo_record(argc, argv, o.cfg.seed, app.got_subcommand(show) ? "" : config_echo(o.cfg));
        if (app.got_subcommand(show)) {
            const auto space = spaces::space_from_json(read_file(o.space_file));
            std::cout << space.describe() << "\n";
            std::cout << "dimension: " << space.dim() << "\n";
            if (space.has_vertex_list())
                std::cout << "ball vertices: " << space.ball_vertices().size() << "\n";
            else
                std::cout << "ball vertices: not enumerable\n";
            if (space.has_dual_vertices())
                std::cout << "dual vertices: " << space.dual_vertices().size() << "\n";
        } else if (app.got_subcommand(dc)) {
            code = run_dc_dec(true, o);
        } else if (app.got_subcommand(dec)) {
            code = run_dc_dec(false, o);
        } else if (app.got_subcommand(cert)) {
            code = run_certify(what, o, alpha, eps);
        } else if (app.got_subcommand(index)) {
            code = run_index(kind, o);
        } else if (app.got_subcommand(opchk)) {
            code = run_operator_check(o, functional_text);
        } else if (app.got_subcommand(sb)) {
            code = run_sum_bounds(o);
        } else if (app.got_subcommand(fig)) {
            code = run_figure(fig_which, fig_n, o.out_file, svg_file);
        } else if (app.got_subcommand(lip_cmd)) {
            if (lip_cmd->got_subcommand(lnorm))
                code = run_lipfree_norm(o.space_file, element_text, pair_text, o.out_file);
            else if (lip_cmd->got_subcommand(lladder))
                code = run_lipfree_ladder(rungs, grid_k, o.out_file);
            else
                code = run_lipfree_check(o.space_file, element_text, pair_text, alpha, o.out_file);
        } else if (app.got_subcommand(verify)) {
            code = run_verify(suite, o.cfg.seed, o.cfg, out_dir);
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const UnsupportedVariant& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const ResourceError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kExitInput;
    }
    std::cout << "# time: " << human(watch.seconds()) << "s\n";
    return code;
}
