// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <ep/ep_engine.hpp>
#include <ep/facet_calculus.hpp>
#include <ep/harish_chandra.hpp>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <unistd.h>

#ifndef EPV_PATH
#error "EPV_PATH must name the epv executable"
#endif

using namespace ep;

namespace {

bool height_is_gallery_distance() {
    const std::vector<std::pair<std::string, int>> cases = {{"A2", 12}, {"C2", 12}, {"G2", 12},
                                                            {"A3", 8},  {"B3", 8},  {"C3", 8}};
    for (const auto& [type, radius] : cases) {
        Apartment apt(CartanType::parse(type));
        const Ball ball = apt.ball(radius);
        for (std::size_t i = 0; i < ball.size(); ++i)
            if (apt.height_total(ball.chambers[0], ball.chambers[i]) != ball.depth[i]) {
                std::cerr << type << ": height differs from gallery distance\n";
                return false;
            }
    }
    return true;
}

bool simplex_census() {
    for (int l = 0; l <= 6; ++l)
        for (int m = 1; m <= l + 1; ++m)
            if (!complement_census(l, m).consistent()) {
                std::cerr << "census mismatch at l=" << l << " m=" << m << "\n";
                return false;
            }
    return true;
}

bool power_law() {
    for (const char* type : {"A2", "C2", "G2", "A3", "B3", "C3"}) {
        Apartment apt(CartanType::parse(type));
        const Ball ball = apt.ball(10);
        const Chamber& c0 = ball.chambers[0];
        for (std::size_t i = 1; i < ball.size(); ++i) {
            const auto cp = apt.classify_faces(c0, ball.chambers[i]);
            const auto fplus = apt.f_plus_types(c0, ball.chambers[i]);
            if (fplus.size() != (std::size_t{1} << cp.children.size()) ||
                static_cast<int>(cp.children.size() + cp.parents.size()) != apt.rank() + 1) {
                std::cerr << type << ": power law fails\n";
                return false;
            }
        }
    }
    return true;
}

const std::vector<std::pair<std::string, int>> kGroups = {
    {"GL2", 2}, {"GL2", 3}, {"SL2", 3}, {"SL3", 2}, {"Sp4", 2}};

bool report_holds(const VerificationReport& rep) {
    for (const auto& c : rep.checks)
        if (!c.holds) std::cerr << rep.group << ": " << c.identity << " fails at " << c.instance << "\n";
    return rep.all_hold() && !rep.checks.empty();
}

bool finite_field_vanishing() {
    bool ok = true;
    for (const auto& [kind, q] : kGroups) {
        auto g = build_group(kind, q);
        HarishChandraData hc(g);
        VerificationReport rep = verify_radical_sums_all(*g);
        for (std::size_t c = 0; c < hc.classes().size(); ++c) rep.append(verify_block_identities(hc, static_cast<int>(c)));
        rep.group = g->name();
        ok &= report_holds(rep);
    }
    return ok;
}

bool block_partition() {
    bool ok = true;
    for (const auto& [kind, q] : kGroups) {
        HarishChandraData hc(build_group(kind, q));
        VerificationReport rep = verify_block_partition(hc);
        rep.group = hc.group().name();
        ok &= report_holds(rep);
    }
    return ok;
}

bool gl2_cuspidal_count() {
    for (int q : {2, 3}) {
        auto g = build_group("GL2", q);
        auto L = g->levi_group(g->full_mask());
        auto t = character_table(L.group);
        int count = 0;
        for (int chi = 0; chi < t.size(); ++chi) count += is_cuspidal(*g, L, t, chi);
        if (count != q * (q - 1) / 2) {
            std::cerr << "GL2(F" << q << "): " << count << " cuspidal characters\n";
            return false;
        }
    }
    return true;
}

bool dplus_certificates() {
    Apartment apt(CartanType::parse("C2"));
    const int rho = 1;
    const Ball ball = apt.ball(30), big = apt.ball(60);
    const Chamber& c0 = ball.chambers[0];
    const auto scan = dplus_scan(apt, ball, rho);
    const auto scan2 = dplus_scan(apt, big, rho);
    if (scan.certificates.size() + 1 != ball.size()) return false;
    ResidueLibrary lib;
    long checked = 0;
    for (const auto& cert : scan.certificates) {
        if (cert.exceptional) continue;
        if (!verify_certificate(apt, c0, cert)) {
            std::cerr << "witness does not verify\n";
            return false;
        }
        const auto inst = lib.instantiate(residue_datum(apt, cert.chamber, cert.d_plus_types), 2);
        if (!inst.supported) continue;
        if (!certificate_residue_check(apt, c0, cert, 2, lib).all_zero()) {
            std::cerr << "nonzero residue convolution\n";
            return false;
        }
        ++checked;
    }
    std::set<IntVec> e1, e2;
    for (int i : scan.exceptional) e1.insert(ball.chambers[i].key);
    for (int i : scan2.exceptional) e2.insert(big.chambers[i].key);
    std::cerr << "C2 rho=1: " << e1.size() << " exceptional in Ball(30), " << e2.size() << " in Ball(60), " << checked
              << " residue checks\n";
    return e1 == e2 && checked > 0;
}

bool depth_r_model() {
    for (const char* type : {"A2", "C2"}) {
        Apartment apt(CartanType::parse(type));
        const Ball ball = apt.ball(15);
        for (std::size_t i = 1; i < ball.size(); ++i)
            if (!depth_r_shell_vanishing(apt, ball.chambers[0], ball.chambers[i], 1).holds()) {
                std::cerr << type << ": graded identity fails\n";
                return false;
            }
        TraceOptions o;
        o.radius = 16;
        for (int rho = 0; rho <= 3; ++rho) {
            o.rho = rho;
            const auto tr = truncated_sum_stabilization(apt, o);
            if (!tr.facet_partition || !tr.stabilized()) {
                std::cerr << type << ": depth-r trace does not stabilize for rho=" << rho << "\n";
                return false;
            }
        }
        o.mode = "depth-zero";
        o.radius = 6;
        ResidueLibrary lib;
        for (const auto& p : detail::all_type_subsets(apt.rank())) {
            o.probe_types = p;
            const auto tr = truncated_sum_stabilization(apt, o, &lib);
            if (!tr.facet_partition || !tr.stabilized() || !tr.equals_probe) {
                std::cerr << type << ": depth-zero trace fails for probe " << detail::join_types(p) << "\n";
                return false;
            }
        }
    }
    return true;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::ostringstream s;
    s << f.rdbuf();
    return s.str();
}

bool deterministic_reports() {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / ("epv-acceptance-" + std::to_string(::getpid()));
    fs::create_directories(dir);
    std::string runs[2];
    bool ok = true;
    for (int k = 0; k < 2; ++k) {
        const fs::path out = dir / ("all-" + std::to_string(k) + ".json");
        const std::string cmd = std::string("\"") + EPV_PATH + "\" all --out \"" + out.string() + "\"";
        if (std::system(cmd.c_str()) != 0) {
            std::cerr << "epv all did not exit cleanly\n";
            ok = false;
        }
        runs[k] = slurp(out);
    }
    fs::remove_all(dir);
    return ok && !runs[0].empty() && runs[0] == runs[1];
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<bool()>>> criteria = {
        {"height equals gallery distance", height_is_gallery_distance},
        {"simplex census", simplex_census},
        {"2-power law", power_law},
        {"finite-field vanishing", finite_field_vanishing},
        {"block partition of unity", block_partition},
        {"GL2 cuspidal count", gl2_cuspidal_count},
        {"dplus certificates", dplus_certificates},
        {"depth-r model and trace stabilization", depth_r_model},
        {"deterministic reports", deterministic_reports},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto start = std::chrono::steady_clock::now();
        bool ok = false;
        try {
            ok = criteria[i].second();
        } catch (const std::exception& e) {
            std::cerr << "exception: " << e.what() << "\n";
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("%s %zu %s (%.2f s)\n", ok ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(), secs);
        std::fflush(stdout);
        failed += !ok;
    }
    return failed == 0 ? 0 : 1;
}
