#include "coarse/cli.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>

#include "coarse/embedding.hpp"
#include "coarse/errors.hpp"
#include "coarse/generators.hpp"
#include "coarse/oracle.hpp"
#include "coarse/poincare.hpp"
#include "coarse/space_io.hpp"
#include "coarse/witness.hpp"

namespace coarse {

namespace {

namespace fs = std::filesystem;

struct LoadedSpace {
    std::shared_ptr<const FiniteSpace> space;
    std::optional<Graph> graph;
    std::string name;
};

// spec strings contain ':', file paths do not
LoadedSpace load_space(const std::string& arg) {
    LoadedSpace out;
    if (arg.find(':') != std::string::npos) {
        GenSpec spec = GenSpec::parse(arg);
        Graph g = gen(spec);
        out.space = std::make_shared<FiniteSpace>(from_graph(g));
        out.graph = std::move(g);
        out.name = spec.to_string();
        for (char& c : out.name)
            if (c == ':' || c == ',' || c == '=') c = '_';
    } else {
        SpaceFile sf = read_space_file(arg);
        out.space = std::make_shared<FiniteSpace>(std::move(sf.space));
        out.graph = std::move(sf.graph);
        out.name = fs::path(arg).stem().string();
    }
    return out;
}

std::vector<int> dyadic_scales(const FiniteSpace& s) {
    double diam = s.diameter();
    int kmax = diam > 2.0 ? static_cast<int>(std::floor(std::log2(diam / 2.0) + 1e-9)) : 0;
    std::vector<int> scales;
    for (int k = 0; k <= kmax; ++k) scales.push_back(1 << k);
    return scales;
}

WitnessFamily build_family(const RunConfig& cfg, std::shared_ptr<const FiniteSpace> sp,
                           const std::vector<int>& scales) {
    if (cfg.family == "subexp") {
        WitnessFamily f = subexp_family(sp, scales);
        return cfg.p == 1.0 ? f : p_convert(f, cfg.p);
    }
    if (cfg.family == "uniform_volume") return uniform_volume_family(sp, cfg.p, scales);
    if (cfg.family == "doubling") return doubling_family(sp, cfg.p, scales);
    throw InvalidSpec("unknown family " + cfg.family);
}

std::ofstream open_out(const RunConfig& cfg, const std::string& file) {
    fs::create_directories(cfg.out_dir);
    std::ofstream out(fs::path(cfg.out_dir) / file);
    if (!out) throw ParseError("cannot write " + file + " under " + cfg.out_dir);
    out.precision(17);
    return out;
}

} // namespace

std::string format_failures(const std::vector<std::string>& failures) {
    std::string s = "failures=[";
    for (std::size_t i = 0; i < failures.size(); ++i) {
        if (i) s += ",";
        s += "\"";
        for (char c : failures[i]) {
            if (c == '"' || c == '\\') s += '\\';
            s += c;
        }
        s += "\"";
    }
    s += "]";
    return s;
}

CommandResult cmd_gen(const RunConfig& cfg) {
    GenSpec spec = GenSpec::parse(cfg.space_arg);
    Graph g = gen(spec);
    auto sp = from_graph(g);

    std::string file = cfg.out_file;
    if (file.empty()) {
        std::string name = spec.to_string();
        for (char& c : name)
            if (c == ':' || c == ',' || c == '=') c = '_';
        file = name + ".space";
    }
    fs::path target(file);
    if (!target.is_absolute() && cfg.out_dir != ".") target = fs::path(cfg.out_dir) / target;
    if (target.has_parent_path()) fs::create_directories(target.parent_path());
    write_space_file(target.string(), g);

    std::vector<double> radii;
    double diam = sp.diameter();
    for (int r = 1; 2 * r <= static_cast<int>(diam); ++r) radii.push_back(r);
    if (radii.empty()) radii.push_back(1.0);
    double C = doubling_constant(sp, radii);

    CommandResult res;
    std::ostringstream os;
    os << "n=" << sp.n() << " diameter=" << diam << " doubling_constant=" << C
       << " file=" << target.string();
    res.summary = os.str();
    return res;
}

CommandResult cmd_embed(const RunConfig& cfg) {
    LoadedSpace ls = load_space(cfg.space_arg);
    std::vector<int> scales = cfg.scales.empty() ? dyadic_scales(*ls.space) : cfg.scales;
    WitnessFamily fam = build_family(cfg, ls.space, scales);
    NormalizeResult norm = normalize(fam);

    RateFunction f{cfg.rate_a, cfg.rate_b};
    int kmax = 0;
    while ((2 << kmax) <= scales.back()) ++kmax;
    Embedding e = build_uniform_embedding(norm.family, norm.profile, f, cfg.base, kmax);
    EmbeddingProfiles prof = embedding_profiles(e);

    auto csv = open_out(cfg, ls.name + ".profiles.csv");
    csv << "t,rho,delta,theta\n";
    for (std::size_t i = 0; i < prof.rho.t.size(); ++i)
        csv << prof.rho.t[i] << "," << prof.rho.value[i] << "," << prof.delta.value[i]
            << "," << (prof.theta.flagged[i] ? std::string("nan")
                                             : std::to_string(prof.theta.value[i]))
            << "\n";

    auto apcsv = open_out(cfg, ls.name + ".aprofile.csv");
    apcsv << "n,J,lipschitz,saturated\n";
    for (const auto& s : norm.profile.samples)
        apcsv << s.n << "," << s.J << "," << s.lipschitz << "," << (s.saturated ? 1 : 0)
              << "\n";

    CommandResult res;
    AuditReport a1 = disjoint_support_audit(e);
    AuditReport a2 = lipschitz_audit(e);
    if (!a1.pass) res.failures.push_back("disjoint_support_audit");
    if (!a2.pass) res.failures.push_back("lipschitz_audit");

    std::ostringstream os;
    os << "space=" << ls.name << " p=" << cfg.p << " scales=" << scales.size()
       << " fit_a=" << prof.fit_a << " fit_b=" << prof.fit_b;
    try {
        os << " empirical_rate=" << empirical_rate(prof.rho);
    } catch (const InsufficientData&) {
        os << " empirical_rate=InsufficientData";
    }
    os << " disjoint_support=" << (a1.pass ? "pass" : "FAIL")
       << " lipschitz=" << (a2.pass ? "pass" : "FAIL");
    for (const auto& w : e.warnings) os << "\nwarning: " << w;
    for (const auto& w : fam.warnings) os << "\nwarning: " << w;
    res.summary = os.str();
    res.exit_code = res.failures.empty() ? 0 : 1;
    return res;
}

CommandResult cmd_certify(const RunConfig& cfg) {
    LoadedSpace ls = load_space(cfg.space_arg);
    CommandResult res;
    std::ostringstream os;

    auto emit_single = [&](const PoincareCertificate& cert) {
        auto f = open_out(cfg, ls.name + ".certificate");
        write_certificate(f, cert);
        ConstraintReport rep = compression_constraint(cert);
        auto c = open_out(cfg, ls.name + ".constraint.csv");
        c << "t,ceiling\n";
        for (std::size_t i = 0; i < rep.t.size(); ++i)
            c << rep.t[i] << "," << rep.ceiling[i] << "\n";
        os << "J=" << cert.J << " r=" << cert.r << " method=" << method_name(cert.method)
           << " c_p_lower=" << rep.c_p_lower
           << (rep.certified ? "" : " (advisory)");
    };
    auto emit_cumulative = [&](const CumulativeCertificate& cert) {
        auto f = open_out(cfg, ls.name + ".certificate");
        write_certificate(f, cert);
        ConstraintReport rep = cumulative_constraint(cert);
        auto c = open_out(cfg, ls.name + ".constraint.csv");
        c << "t,ceiling\n";
        for (std::size_t i = 0; i < rep.t.size(); ++i)
            c << rep.t[i] << "," << rep.ceiling[i] << "\n";
        os << "fitted_c=" << cert.fitted_c << " scales=" << cert.scale_ks.size()
           << " method=" << method_name(cert.method) << " c_p_lower=" << rep.c_p_lower
           << (rep.certified ? "" : " (advisory)");
        if (rep.q_mismatch) os << " q=" << rep.q;
    };

    if (cfg.kind == "expander") {
        emit_single(expander_certificate(*ls.space));
    } else if (cfg.kind == "tree_cp") {
        emit_cumulative(tree_cp_certificate(*ls.space, cfg.p));
    } else if (cfg.kind == "laakso_cp") {
        GenSpec spec = GenSpec::parse(cfg.space_arg);
        if (spec.kind != GenKind::laakso) throw InvalidSpec("laakso_cp needs laakso:<level>");
        emit_cumulative(laakso_cp_check(static_cast<int>(spec.params.at(0)), cfg.p));
    } else if (cfg.kind == "skew_cube") {
        if (cfg.cube.empty()) throw InvalidSpec("skew_cube needs --cube corner list");
        emit_single(skew_cube_certificate(*ls.space, cfg.cube));
    } else if (cfg.kind.rfind("file:", 0) == 0) {
        std::ifstream in(cfg.kind.substr(5));
        if (!in) throw ParseError("cannot open measures file");
        PoincareCertificate base = read_certificate(in);
        if (cfg.p == 2.0) {
            emit_single(optimal_constant_p2(*ls.space, base.pair));
        } else {
            emit_single(optimal_constant_general(*ls.space, base.pair, cfg.p, 2000, cfg.seed));
        }
    } else {
        throw InvalidSpec("unknown certify kind " + cfg.kind);
    }
    res.summary = os.str();
    return res;
}

CommandResult cmd_bracket(const RunConfig& cfg) {
    LoadedSpace ls = load_space(cfg.space_arg);
    const FiniteSpace& s = *ls.space;
    CommandResult res;

    // certificate lower bound: max-distance single-scale P against unit pairs,
    // and the dyadic-shell cumulative recipe; best certified value wins
    double lower = 1.0;
    {
        std::vector<std::pair<int, int>> far, unit;
        double diam = s.diameter();
        double dmin = s.min_positive_distance();
        for (int x = 0; x < s.n(); ++x)
            for (int y = x + 1; y < s.n(); ++y) {
                if (s.dist(x, y) >= diam - 1e-9) far.emplace_back(x, y);
                if (s.dist(x, y) <= dmin + 1e-9) unit.emplace_back(x, y);
            }
        if (!far.empty() && !unit.empty() && cfg.p == 2.0) {
            MeasurePair mp;
            mp.r = diam;
            mp.P = PairMeasure::uniform(std::move(far));
            mp.Q = PairMeasure::uniform(std::move(unit));
            PoincareCertificate cert = optimal_constant_p2(s, std::move(mp));
            if (cert.J > 0.0)
                lower = std::max(lower, compression_constraint(cert).c_p_lower);
        }
    }

    // constructive upper: doubling-family distortion embedding
    double emb_upper;
    {
        std::vector<int> scales = dyadic_scales(s);
        RunConfig fam_cfg = cfg;
        WitnessFamily fam = build_family(fam_cfg, ls.space, scales);
        NormalizeResult norm = normalize(fam);
        Embedding e = build_distortion_embedding(norm.family, norm.profile, cfg.base);
        emb_upper = distortion(e);
    }

    double exact_lo = 0.0, exact_hi = 0.0;
    bool have_exact = cfg.p == 2.0 && s.n() <= 64;
    if (have_exact) {
        DistortionBracket br = exact_c2(s, cfg.tol, 20000, 1e-7, emb_upper);
        exact_lo = br.lower;
        exact_hi = br.upper;
    }
    double num_upper = numeric_cp_upper(s, cfg.p, std::min(s.n(), 8), 4, cfg.seed);

    bool consistent = true;
    if (have_exact)
        consistent = lower <= exact_lo + 1e-3 && exact_hi <= num_upper + 1e-3 &&
                     num_upper <= emb_upper + 1e-3;
    else
        consistent = lower <= num_upper + 1e-3 && num_upper <= emb_upper + 1e-3;

    auto csv = open_out(cfg, ls.name + ".bracket.csv");
    csv << "space,p,lower,upper,method\n";
    csv << ls.name << "," << cfg.p << "," << lower << "," << num_upper << ",certificate+numeric\n";
    if (have_exact)
        csv << ls.name << "," << cfg.p << "," << exact_lo << "," << exact_hi << ",dr_bisection\n";
    csv << ls.name << "," << cfg.p << "," << lower << "," << emb_upper << ",certificate+embedding\n";

    std::ostringstream os;
    os << "lower=" << lower;
    if (have_exact) os << " exact=[" << exact_lo << "," << exact_hi << "]";
    os << " numeric_upper=" << num_upper << " embedding_upper=" << emb_upper
       << " verdict=" << (consistent ? "consistent" : "INCONSISTENT");
    res.summary = os.str();
    if (!consistent) {
        res.failures.push_back("bracket_consistency");
        res.exit_code = 1;
    }
    return res;
}

CommandResult cmd_profile(const RunConfig& cfg) {
    LoadedSpace ls = load_space(cfg.space_arg);
    const FiniteSpace& s = *ls.space;

    std::vector<double> radii;
    for (double t : s.distance_grid()) radii.push_back(t);
    GrowthProfile gp = growth_profile(s, radii);
    auto gcsv = open_out(cfg, ls.name + ".growth.csv");
    gcsv << "r,vmin,vmax,uniformity\n";
    for (std::size_t i = 0; i < gp.radii.size(); ++i)
        gcsv << gp.radii[i] << "," << gp.vmin[i] << "," << gp.vmax[i] << ","
             << gp.uniformity[i] << "\n";

    std::vector<int> scales = cfg.scales.empty() ? dyadic_scales(s) : cfg.scales;
    WitnessFamily fam = build_family(cfg, ls.space, scales);
    NormalizeResult norm = normalize(fam);
    auto acsv = open_out(cfg, ls.name + ".aprofile.csv");
    acsv << "n,J,lipschitz,saturated\n";
    for (const auto& smp : norm.profile.samples)
        acsv << smp.n << "," << smp.J << "," << smp.lipschitz << ","
             << (smp.saturated ? 1 : 0) << "\n";

    auto dump = open_out(cfg, ls.name + ".family");
    for (std::size_t si = 0; si < norm.family.scales.size(); ++si)
        for (int x = 0; x < s.n(); ++x) {
            const SparseVec& v = norm.family.psi[si][x];
            for (std::size_t e = 0; e < v.size(); ++e)
                dump << norm.family.scales[si] << " " << x << " " << v.idx[e] << " "
                     << v.val[e] << "\n";
        }

    CommandResult res;
    std::ostringstream os;
    os << "space=" << ls.name << " n=" << s.n() << " diameter=" << s.diameter()
       << " scales=" << scales.size();
    res.summary = os.str();
    return res;
}

CommandResult run_command(const RunConfig& cfg) {
    if (cfg.command == "gen") return cmd_gen(cfg);
    if (cfg.command == "embed") return cmd_embed(cfg);
    if (cfg.command == "certify") return cmd_certify(cfg);
    if (cfg.command == "bracket") return cmd_bracket(cfg);
    if (cfg.command == "profile") return cmd_profile(cfg);
    throw InvalidSpec("unknown command " + cfg.command);
}

} // namespace coarse
