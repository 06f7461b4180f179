#include "commands.hpp"

#include "svg.hpp"

#include <ep/ep_engine.hpp>
#include <ep/facet_calculus.hpp>
#include <ep/finite_reductive.hpp>
#include <ep/group_algebra.hpp>
#include <ep/harish_chandra.hpp>

#include <fmt/format.h>

#include <algorithm>
#include <functional>
#include <set>
#include <sstream>

namespace epv {

namespace {

const std::vector<std::string> kFiniteFieldSuite = {"GL2:2", "GL2:3", "SL2:3", "SL3:2", "Sp4:2"};

std::string key_string(const ep::IntVec& key) {
    std::string s = "[";
    for (std::size_t i = 0; i < key.size(); ++i) s += (i ? "," : "") + std::to_string(key[i]);
    return s + "]";
}

std::string types_string(const std::vector<int>& t) { return ep::detail::join_types(t); }

ep::Apartment apartment_for(const RunConfig& cfg) { return ep::Apartment(ep::CartanType::parse(cfg.type)); }

struct GroupRequest {
    std::string kind;
    int q;
};

GroupRequest parse_group(const std::string& s) {
    auto colon = s.find(':');
    if (colon == std::string::npos) throw ConfigError("group '" + s + "' must be written KIND:q, e.g. GL2:3");
    GroupRequest g{s.substr(0, colon), 0};
    try {
        std::size_t used = 0;
        g.q = std::stoi(s.substr(colon + 1), &used);
        if (used != s.size() - colon - 1) throw std::invalid_argument("trailing characters");
    } catch (const std::exception&) {
        throw ConfigError("group '" + s + "' has a malformed field order");
    }
    ep::GroupSpec::parse(g.kind, g.q);
    ep::FiniteField::of_order(g.q);
    return g;
}

// "1,0:0;0,1:-2" lists affine roots as gradient:level.
std::vector<ep::AffineRoot> parse_pairs(const std::string& s, int rank) {
    std::vector<ep::AffineRoot> out;
    std::stringstream items(s);
    std::string item;
    while (std::getline(items, item, ';')) {
        if (item.empty()) continue;
        auto colon = item.find(':');
        if (colon == std::string::npos) throw ConfigError("affine root '" + item + "' must be written g1,...,gl:level");
        ep::AffineRoot a;
        try {
            std::stringstream grad(item.substr(0, colon));
            std::string c;
            while (std::getline(grad, c, ',')) a.gradient.push_back(std::stol(c));
            a.level = std::stol(item.substr(colon + 1));
        } catch (const std::exception&) {
            throw ConfigError("affine root '" + item + "' is malformed");
        }
        if (static_cast<int>(a.gradient.size()) != rank)
            throw ConfigError("affine root '" + item + "' has the wrong number of coordinates");
        out.push_back(a);
    }
    if (out.empty()) throw ConfigError("no affine roots given");
    return out;
}

Json matrix_json(const ep::Mat& m, int n) {
    Json rows = Json::array();
    for (int r = 0; r < n; ++r) {
        Json row = Json::array();
        for (int c = 0; c < n; ++c) row.push_back(m.at(r, c));
        rows.push_back(row);
    }
    return rows;
}

std::string subset_string(unsigned s, int rank) {
    std::vector<int> t;
    for (int i = 0; i < rank; ++i)
        if (s & (1u << i)) t.push_back(i + 1);
    return types_string(t);
}

// ---------------------------------------------------------------------------

Report run_roots(const RunConfig& cfg) {
    Report rep;
    const ep::RootSystem rs(ep::CartanType::parse(cfg.type));
    Json roots = Json::array(), coroots = Json::array();
    for (int i = 0; i < rs.num_roots(); ++i) {
        roots.push_back(to_json(rs.root(i)));
        coroots.push_back(to_json(rs.coroot(i)));
    }
    Json gram = Json::array();
    for (const auto& row : rs.gram()) gram.push_back(to_json(row));
    rep.results["type"] = rs.type().name();
    rep.results["rank"] = rs.rank();
    rep.results["roots"] = roots;
    rep.results["coroots"] = coroots;
    rep.results["positive_roots"] = rs.num_positive();
    rep.results["highest_root"] = to_json(rs.highest_root());
    rep.results["gram"] = gram;
    rep.results["weyl_order"] = rs.weyl_group().size();
    rep.results["positive_systems"] = rs.positive_systems().size();

    bool self = true;
    for (int i = 0; i < rs.num_roots(); ++i) self &= rs.pairing(rs.root(i), i) == 2;
    rep.check("root paired with its own coroot is 2", rs.type().name(), self);
    rep.check("positive systems are in bijection with the Weyl group", rs.type().name(),
              rs.positive_systems().size() == rs.weyl_group().size());
    bool closed = true;
    for (int i = 0; i < rs.rank(); ++i)
        for (int k = 0; k < rs.num_roots(); ++k) closed &= rs.index_of(rs.reflect_root(rs.root(k), i)) >= 0;
    rep.check("simple reflections permute the roots", rs.type().name(), closed);
    bool dominated = true;
    for (int k = 0; k < rs.num_positive(); ++k)
        for (int i = 0; i < rs.rank(); ++i) dominated &= rs.root(k)[i] <= rs.highest_root()[i];
    rep.check("highest root dominates every positive root", rs.type().name(), dominated);
    return rep;
}

Report run_apartment(const RunConfig& cfg) {
    Report rep;
    const ep::Apartment apt = apartment_for(cfg);
    const int R = *cfg.radius;
    const ep::Ball ball = apt.ball(R);
    const ep::Chamber& c0 = ball.chambers[0];
    const auto& ps = apt.roots().positive_systems().at(cfg.sector);

    Json chambers = Json::array();
    std::vector<bool> height_ok(R + 1, true), power_ok(R + 1, true);
    std::vector<char> in_sector(ball.size(), 0);
    for (std::size_t i = 0; i < ball.size(); ++i) {
        const auto& d = ball.chambers[i];
        const int m = ball.depth[i];
        const auto h = apt.height(c0, d);
        in_sector[i] = apt.sector_membership(c0, ps, d);
        Json rec = chamber_json(apt, d);
        rec["depth"] = m;
        rec["height"] = h.total;
        rec["profile"] = to_json(h.counts);
        rec["in_sector"] = static_cast<bool>(in_sector[i]);
        height_ok[m] = height_ok[m] && h.total == m;
        if (m > 0) {
            const auto cp = apt.classify_faces(c0, d);
            const auto fplus = apt.f_plus_types(c0, d);
            rec["children"] = to_json(cp.children);
            rec["parents"] = to_json(cp.parents);
            rec["f_plus"] = fplus.size();
            power_ok[m] = power_ok[m] && fplus.size() == (std::size_t{1} << cp.children.size()) &&
                          static_cast<int>(cp.children.size() + cp.parents.size()) == apt.rank() + 1;
        }
        chambers.push_back(rec);
    }
    Json shells = Json::array();
    for (const auto& s : ball.shells) shells.push_back(s.size());
    rep.results["type"] = cfg.type;
    rep.results["radius"] = R;
    rep.results["scale"] = apt.scale();
    rep.results["shell_sizes"] = shells;
    rep.results["chambers"] = chambers;
    for (int m = 0; m <= R; ++m) {
        const std::string inst = fmt::format("{} shell {} ({} chambers)", cfg.type, m, ball.shells[m].size());
        rep.check("height equals gallery distance", inst, height_ok[m]);
        if (m > 0) rep.check("|F+(D)| = 2^|c(D)| and |c(D)| + |p(D)| = rank + 1", inst, power_ok[m]);
    }

    if (!cfg.svg.empty()) {
        Rank2Figure fig(apt);
        auto fill = [&](int i) -> std::string {
            if (i == 0) return "#9e9e9e";
            return in_sector[i] ? "#cfe3f7" : "#ffffff";
        };
        auto label = [&](int i) { return std::to_string(apt.height_total(c0, ball.chambers[i])); };
        write_file(cfg.svg, fig.render(ball, fill, label,
                                       fmt::format("Heights of chambers in {} up to gallery distance {}", cfg.type, R)));
        rep.results["svg"] = cfg.svg;
    }
    return rep;
}

Report run_simplex(const RunConfig& cfg) {
    Report rep;
    Json rows = Json::array();
    for (int m = 1; m <= cfg.l + 1; ++m) {
        const auto c = ep::complement_census(cfg.l, m);
        rows.push_back(Json{{"l", c.l},
                            {"m", c.m},
                            {"union_counts", to_json(c.union_counts)},
                            {"union_counts_enumerated", to_json(c.union_counts_enumerated)},
                            {"complement_counts", to_json(c.complement_counts)},
                            {"complement_counts_enumerated", to_json(c.complement_counts_enumerated)},
                            {"complement_total", c.complement_total}});
        rep.check("union and complement facet counts match enumeration", fmt::format("l={} m={}", cfg.l, m),
                  c.consistent());
    }
    rep.results["l"] = cfg.l;
    rep.results["census"] = rows;
    return rep;
}

Report run_permissible(const RunConfig& cfg) {
    Report rep;
    const ep::Apartment apt = apartment_for(cfg);
    const ep::Chamber& c0 = apt.fundamental_chamber();
    const int rmax = *cfg.radius;
    std::vector<std::vector<ep::AffineRoot>> sets;
    if (!cfg.pairs.empty()) {
        sets.push_back(parse_pairs(cfg.pairs, apt.rank()));
    } else {
        const int n = apt.rank() + 1;
        for (unsigned mask = 1; mask < (1u << n); ++mask) {
            if (__builtin_popcount(mask) > apt.rank()) continue;
            std::vector<int> faces;
            for (int j = 0; j < n; ++j)
                if (mask & (1u << j)) faces.push_back(j);
            sets.push_back(ep::chamber_walls(apt, c0, faces));
        }
    }
    Json scans = Json::array();
    for (const auto& s : sets) {
        ep::PermissibleSet x;
        ep::PermissibleScan scan;
        try {
            x = ep::make_permissible(apt.roots(), s);
            scan = ep::permissible_scan(apt, x, c0, rmax);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(e.what());
        }
        Json pairs = Json::array();
        for (const auto& p : x.pairs) pairs.push_back(to_json(p));
        Json keys = Json::array();
        for (int i : scan.chambers) keys.push_back(to_json(scan.ball.chambers[i].key));
        std::string name;
        for (const auto& p : x.pairs) name += (name.empty() ? "" : " ") + ep::describe(p);
        scans.push_back(Json{{"pairs", pairs},
                             {"count_within", to_json(scan.count_within)},
                             {"incident", scan.incident},
                             {"stable", scan.stable},
                             {"chambers", keys}});
        rep.check("witness count unchanged when the radius doubles", fmt::format("{} {}", cfg.type, name),
                  scan.stable);
    }
    rep.results["type"] = cfg.type;
    rep.results["rmax"] = rmax;
    rep.results["scans"] = scans;
    return rep;
}

Report run_group(const RunConfig& cfg) {
    Report rep;
    Json groups = Json::array();
    for (const auto& spec : cfg.groups) {
        const auto req = parse_group(spec);
        const auto g = ep::build_group(req.kind, req.q, cfg.cap);
        const auto& G = g->group();
        const auto& F = g->field();
        Json j;
        j["name"] = g->name();
        j["order"] = G.order();
        j["order_formula"] = g->spec().order_formula().get_str();
        j["field"] = Json{{"p", F.p()}, {"e", F.e()}, {"modulus", F.modulus_string()}};
        j["rank"] = g->rank();
        Json cartan = Json::array();
        for (const auto& row : g->cartan()) cartan.push_back(to_json(row));
        j["cartan"] = cartan;
        Json roots = Json::array();
        for (const auto& r : g->roots()) roots.push_back(to_json(r.coefficients));
        j["roots"] = roots;
        j["exponent"] = G.exponent();
        Json classes = Json::array();
        long total = 0;
        for (int c = 0; c < G.classes().count(); ++c) {
            const int rep_elem = G.classes().representative(c);
            total += static_cast<long>(G.classes().classes[c].size());
            classes.push_back(Json{{"size", G.classes().classes[c].size()},
                                   {"representative", rep_elem},
                                   {"element_order", G.element_order(rep_elem)},
                                   {"matrix", matrix_json(G.element(rep_elem), G.dim())}});
        }
        j["classes"] = classes;
        Json parabolics = Json::array();
        bool factor = true;
        for (unsigned a = 0; a <= g->full_mask(); ++a) {
            const auto p = g->standard_parabolic(a);
            factor &= p.radical.size() * p.levi.size() == p.elements.size();
            parabolics.push_back(Json{{"subset", subset_string(a, g->rank())},
                                      {"order", p.elements.size()},
                                      {"radical", p.radical.size()},
                                      {"levi", p.levi.size()}});
        }
        j["parabolics"] = parabolics;
        if (cfg.elements) {
            Json elems = Json::array();
            for (int i = 0; i < G.order(); ++i) elems.push_back(matrix_json(G.element(i), G.dim()));
            j["elements"] = elems;
        }
        groups.push_back(j);
        rep.check("enumerated order equals the order formula", g->name(),
                  mpz_class(G.order()) == g->spec().order_formula());
        rep.check("class sizes sum to the group order", g->name(), total == G.order());
        rep.check("|rad P| * |Levi| = |P| for every standard parabolic", g->name(), factor);
    }
    rep.results["groups"] = groups;
    return rep;
}

Report run_chars(const RunConfig& cfg) {
    Report rep;
    Json tables = Json::array();
    for (const auto& spec : cfg.groups) {
        const auto req = parse_group(spec);
        const auto g = ep::build_group(req.kind, req.q, cfg.cap);
        const auto t = ep::character_table(g->group_ptr());
        Json values = Json::array();
        mpz_class sum = 0;
        for (int chi = 0; chi < t.size(); ++chi) {
            Json row = Json::array();
            for (const auto& v : t.values[chi]) row.push_back(to_json(v));
            values.push_back(row);
            sum += mpz_class(t.degrees[chi]) * t.degrees[chi];
        }
        tables.push_back(Json{{"group", g->name()},
                              {"conductor", t.conductor},
                              {"prime", t.prime},
                              {"class_sizes", to_json(t.class_sizes)},
                              {"degrees", to_json(t.degrees)},
                              {"values", values}});
        rep.check("row and column orthogonality", g->name(), t.orthogonality_holds());
        rep.check("sum of squared degrees equals the group order", g->name(), sum == g->group().order());
    }
    rep.results["tables"] = tables;
    return rep;
}

Report run_blocks(const RunConfig& cfg) {
    Report rep;
    Json groups = Json::array();
    for (const auto& spec : cfg.groups) {
        const auto req = parse_group(spec);
        const auto g = ep::build_group(req.kind, req.q, cfg.cap);
        const ep::HarishChandraData hc(g);
        const int rank = g->rank();
        Json classes = Json::array();
        for (const auto& c : hc.classes()) {
            Json members = Json::array();
            for (const auto& [subset, chi] : c.members)
                members.push_back(Json{{"levi", subset_string(subset, rank)}, {"character", chi}});
            Json blocks = Json::object();
            for (unsigned m = 0; m <= g->full_mask(); ++m)
                blocks[subset_string(m, rank)] = to_json(hc.block_characters(m, c.index));
            classes.push_back(Json{{"index", c.index},
                                   {"levi", subset_string(c.levi_subset, rank)},
                                   {"character", c.character},
                                   {"members", members},
                                   {"blocks", blocks}});
        }
        Json disc = Json::array();
        for (const auto& d : hc.independence_discrepancies()) disc.push_back(d);
        groups.push_back(Json{{"group", g->name()}, {"classes", classes}, {"independence_discrepancies", disc}});
        rep.append(ep::verify_block_partition(hc, cfg.seed));
        rep.check("block idempotent independent of the auxiliary parabolic", g->name(),
                  hc.independence_discrepancies().empty());
    }
    rep.results["groups"] = groups;
    return rep;
}

Report run_verify_ff(const RunConfig& cfg) {
    Report rep;
    Json groups = Json::array();
    for (const auto& spec : cfg.groups) {
        const auto req = parse_group(spec);
        const auto g = ep::build_group(req.kind, req.q, cfg.cap);
        const ep::HarishChandraData hc(g);
        ep::VerificationReport v = ep::verify_radical_sums_all(*g);
        for (std::size_t c = 0; c < hc.classes().size(); ++c)
            v.append(ep::verify_block_identities(hc, static_cast<int>(c)));
        v.append(ep::verify_block_partition(hc, cfg.seed));
        v.group = g->name();
        rep.append(v);
        groups.push_back(Json{{"group", g->name()},
                              {"order", g->group().order()},
                              {"cuspidal_classes", hc.classes().size()},
                              {"checks", v.checks.size()}});
    }
    rep.results["groups"] = groups;
    Json counts = Json::array();
    for (int q : cfg.q) {
        const auto g = ep::build_group("GL2", q, cfg.cap);
        const auto L = g->levi_group(g->full_mask());
        const auto t = ep::character_table(L.group);
        int count = 0;
        for (int chi = 0; chi < t.size(); ++chi) count += ep::is_cuspidal(*g, L, t, chi);
        counts.push_back(Json{{"q", q}, {"cuspidal", count}, {"expected", q * (q - 1) / 2}});
        rep.check("cuspidal count of GL2(Fq) is q(q-1)/2", g->name(), count == q * (q - 1) / 2);
    }
    rep.results["gl2_cuspidal_counts"] = counts;
    return rep;
}

Report run_verify_dplus(const RunConfig& cfg) {
    Report rep;
    const ep::Apartment apt = apartment_for(cfg);
    const int R = *cfg.radius;
    const int q = cfg.q.front();
    const ep::Ball ball = apt.ball(R);
    const ep::Ball big = apt.ball(2 * R);
    const ep::Chamber& c0 = ball.chambers[0];
    const auto scan = ep::dplus_scan(apt, ball, cfg.rho, cfg.threshold);
    const auto scan2 = ep::dplus_scan(apt, big, cfg.rho, cfg.threshold);
    ep::ResidueLibrary lib(cfg.cap);

    Json records = Json::array();
    std::vector<bool> verified(R + 1, true);
    long residue_checked = 0, residue_skipped = 0;
    for (std::size_t k = 0; k < scan.certificates.size(); ++k) {
        const auto& cert = scan.certificates[k];
        const int m = ball.depth[scan.ball_index[k]];
        Json rec;
        rec["key"] = to_json(cert.chamber.key);
        rec["depth"] = m;
        rec["height"] = cert.height;
        rec["d_plus_types"] = to_json(cert.d_plus_types);
        rec["status"] = cert.exceptional ? "exceptional" : "certified";
        if (!cert.exceptional) {
            const bool ok = ep::verify_certificate(apt, c0, cert);
            verified[m] = verified[m] && ok;
            rec["positive_system"] = cert.positive_system;
            rec["far_simple"] = to_json(cert.far_simple);
            rec["witness"] = to_json(*cert.witness);
            rec["radical_size"] = cert.radical.size();
            rec["witness_verified"] = ok;
            const auto rd = ep::residue_datum(apt, cert.chamber, cert.d_plus_types);
            const auto inst = lib.instantiate(rd, q);
            if (inst.supported) {
                const auto v = ep::certificate_residue_check(apt, c0, cert, q, lib);
                Json res{{"group", v.group}, {"subgroup_order", v.subgroup_order}, {"zero", v.all_zero()}};
                res["standard_radical"] = v.standard_radical ? Json(subset_string(*v.standard_radical, rd.rank()))
                                                             : Json(nullptr);
                rec["residue"] = res;
                ++residue_checked;
                rep.check("alternating parabolic sum against V vanishes",
                          fmt::format("{} D={} residue {}", cfg.type, key_string(cert.chamber.key), v.group),
                          v.all_zero());
            } else {
                rec["residue"] = Json{{"skipped", inst.reason}, {"dynkin", inst.dynkin}};
                ++residue_skipped;
            }
        }
        records.push_back(rec);
    }
    for (int m = 1; m <= R; ++m)
        rep.check("certified witnesses verify", fmt::format("{} shell {}", cfg.type, m), verified[m]);

    std::set<ep::IntVec> ex1, ex2;
    for (int i : scan.exceptional) ex1.insert(ball.chambers[i].key);
    for (int i : scan2.exceptional) ex2.insert(big.chambers[i].key);
    rep.check("exceptional set unchanged when the radius doubles",
              fmt::format("{} rho={} radius {} vs {}", cfg.type, cfg.rho, R, 2 * R), ex1 == ex2);

    std::vector<ep::ExceptionalCensus> censuses;
    Json census = Json::array();
    const int nsys = static_cast<int>(apt.roots().positive_systems().size());
    for (int s = 0; s < nsys; ++s) {
        censuses.push_back(ep::exceptional_enumeration(apt, big, s, cfg.rho, cfg.threshold));
        const auto& c = censuses.back();
        census.push_back(Json{{"positive_system", s},
                              {"sector_per_shell", to_json(c.sector_per_shell)},
                              {"exceptional_per_shell", to_json(c.exceptional_per_shell)},
                              {"exceptional", c.exceptional.size()},
                              {"max_depth", c.exceptional_depth.empty() ? 0 : c.exceptional_depth.back()}});
        rep.check("no exceptional chamber of the sector beyond the base radius",
                  fmt::format("{} sector {} radius {}", cfg.type, s, 2 * R), c.stable_from(R));
    }
    Json symmetry = Json::array();
    for (const auto& sc : ep::census_symmetry(apt, censuses)) {
        symmetry.push_back(Json{{"symmetry", sc.symmetry}, {"from", sc.from}, {"to", sc.to}, {"holds", sc.holds}});
        rep.check("alcove symmetry carries exceptional sets to each other",
                  fmt::format("{} symmetry {} sector {} -> {}", cfg.type, sc.symmetry, sc.from, sc.to), sc.holds);
    }

    Json by_ps = Json::object();
    for (const auto& [s, n] : scan.by_positive_system) by_ps[std::to_string(s)] = n;
    rep.results["type"] = cfg.type;
    rep.results["rho"] = cfg.rho;
    rep.results["threshold"] = cfg.threshold < 0 ? cfg.rho + 2 : cfg.threshold;
    rep.results["radius"] = R;
    rep.results["chambers"] = ball.size();
    rep.results["certified_per_shell"] = to_json(scan.certified_per_shell);
    rep.results["exceptional_per_shell"] = to_json(scan.exceptional_per_shell);
    rep.results["exceptional"] = ex1.size();
    rep.results["exceptional_doubled"] = ex2.size();
    rep.results["by_positive_system"] = by_ps;
    rep.results["residue_checked"] = residue_checked;
    rep.results["residue_skipped"] = residue_skipped;
    rep.results["census"] = census;
    rep.results["symmetry"] = symmetry;
    rep.results["records"] = records;

    if (!cfg.svg.empty()) {
        Rank2Figure fig(apt);
        std::vector<char> exceptional(ball.size(), 0);
        for (int i : scan.exceptional) exceptional[i] = 1;
        auto fill = [&](int i) -> std::string {
            if (i == 0) return "#9e9e9e";
            return exceptional[i] ? "#f4a3a3" : "#b9e4b9";
        };
        auto label = [&](int i) { return std::to_string(ball.depth[i]); };
        write_file(cfg.svg, fig.render(ball, fill, label,
                                       fmt::format("Certified and exceptional chambers of {} for rho {}", cfg.type,
                                                   cfg.rho)));
        rep.results["svg"] = cfg.svg;
    }
    return rep;
}

Report run_verify_depth_r(const RunConfig& cfg) {
    Report rep;
    const ep::Apartment apt = apartment_for(cfg);
    const int R = *cfg.radius;
    const ep::Ball ball = apt.ball(R);
    const ep::Chamber& c0 = ball.chambers[0];
    Json shells = Json::array();
    for (int m = 1; m <= R; ++m) {
        bool monotone = true, absorption = true, vanishing = true;
        long admissible = 0, pairs = 0;
        int max_coords = 0;
        for (int i : ball.shells[m]) {
            const auto chk = ep::depth_r_shell_vanishing(apt, c0, ball.chambers[i], cfg.r);
            monotone &= chk.monotone;
            absorption &= chk.absorption;
            vanishing &= chk.vanishing;
            admissible += chk.admissible;
            pairs += chk.comparable_pairs;
            max_coords = std::max(max_coords, chk.coordinates);
        }
        const std::string inst = fmt::format("{} r={} shell {} ({} chambers)", cfg.type, cfg.r, m, ball.shells[m].size());
        rep.check("K <= K' implies S_K is contained in S_K'", inst, monotone);
        rep.check("e_K * e_K' = e_K' for K <= K'", inst, absorption);
        rep.check("alternating sum over F+(D) against V vanishes for every V other than D+", inst, vanishing);
        shells.push_back(Json{{"shell", m},
                              {"chambers", ball.shells[m].size()},
                              {"comparable_pairs", pairs},
                              {"admissible_v", admissible},
                              {"max_coordinates", max_coords}});
    }
    rep.results["type"] = cfg.type;
    rep.results["r"] = cfg.r;
    rep.results["radius"] = R;
    rep.results["shells"] = shells;
    return rep;
}

Json trace_json(const ep::TruncatedTrace& tr) {
    Json j{{"new_facets", to_json(tr.new_facets)},
           {"increment_terms", to_json(tr.increment_terms)},
           {"partial_terms", to_json(tr.partial_terms)},
           {"facet_partition", tr.facet_partition},
           {"stabilization_radius", tr.stabilization_radius()}};
    if (tr.options.mode == "depth-zero") {
        j["residue_nonzero"] = tr.residue_nonzero;
        j["residue_skipped"] = tr.residue_skipped;
        Json value = Json::array();
        for (const auto& [f, c] : tr.value) value.push_back(Json{{"facet", vertices_json(f.vertices, f.scale)}, {"coefficient", c}});
        j["value"] = value;
    }
    return j;
}

Report run_stabilize(const RunConfig& cfg) {
    Report rep;
    const ep::Apartment apt = apartment_for(cfg);
    ep::TraceOptions o;
    o.mode = cfg.mode;
    o.r = cfg.r;
    o.radius = *cfg.radius;
    o.q = cfg.q.front();
    Json traces = Json::array();
    if (cfg.mode == "depth-r") {
        int prev = -1;
        for (int rho = 0; rho <= cfg.rho; ++rho) {
            o.rho = rho;
            const auto tr = ep::truncated_sum_stabilization(apt, o);
            const std::string inst = fmt::format("{} r={} rho={} radius {}", cfg.type, cfg.r, rho, o.radius);
            rep.check("new facets are the disjoint union of F+(D) over the shell", inst, tr.facet_partition);
            rep.check("increments vanish beyond the stabilization radius", inst, tr.stabilized());
            if (rho > 0)
                rep.check("stabilization radius is monotone in the probe depth", inst,
                          tr.stabilized() && tr.stabilization_radius() >= prev);
            prev = tr.stabilization_radius();
            Json j = trace_json(tr);
            j["rho"] = rho;
            traces.push_back(j);
        }
    } else {
        ep::ResidueLibrary lib(cfg.cap);
        std::vector<std::vector<int>> probes;
        if (!cfg.probe.empty())
            probes.push_back(cfg.probe);
        else
            probes = ep::detail::all_type_subsets(apt.rank());
        for (const auto& p : probes) {
            o.probe_types = p;
            const auto tr = ep::truncated_sum_stabilization(apt, o, &lib);
            const std::string inst = fmt::format("{} probe {} q={} radius {}", cfg.type, types_string(p), o.q, o.radius);
            rep.check("new facets are the disjoint union of F+(D) over the shell", inst, tr.facet_partition);
            rep.check("increments vanish beyond the stabilization radius", inst, tr.stabilized());
            if (tr.residue_skipped == 0)
                rep.check("truncated sum equals the probe facet", inst, tr.equals_probe);
            Json j = trace_json(tr);
            j["probe"] = to_json(p);
            traces.push_back(j);
        }
    }
    rep.results["type"] = cfg.type;
    rep.results["mode"] = cfg.mode;
    rep.results["radius"] = o.radius;
    rep.results["traces"] = traces;
    return rep;
}

Report run_peter_weyl(const RunConfig& cfg) {
    Report rep;
    const ep::Apartment apt = apartment_for(cfg);
    const ep::Chamber& c0 = apt.fundamental_chamber();
    const int q = cfg.q.front();
    ep::ResidueLibrary lib(cfg.cap);
    Json facets = Json::array();
    for (const auto& types : ep::detail::all_type_subsets(apt.rank())) {
        const auto rd = ep::residue_datum(apt, c0, types);
        const auto inst = lib.instantiate(rd, q);
        Json j{{"facet", to_json(types)}, {"dynkin", inst.dynkin}};
        if (!inst.supported) {
            j["skipped"] = inst.reason;
            facets.push_back(j);
            continue;
        }
        auto v = ep::peter_weyl_partition(apt, c0, types, q, lib, cfg.seed);
        v.group = fmt::format("{} facet {} {}", cfg.type, types_string(types), v.group);
        j["group"] = inst.group->name();
        j["checks"] = v.checks.size();
        rep.append(v);
        facets.push_back(j);
    }
    rep.results["type"] = cfg.type;
    rep.results["q"] = q;
    rep.results["facets"] = facets;
    return rep;
}

Report run_all(const RunConfig& cfg) {
    Report rep;
    auto section = [&](const std::string& name, RunConfig sub) {
        sub = resolve(std::move(sub));
        Report r = run(sub);
        r.results = Json{{"config", config_json(sub)}, {"results", r.results}};
        rep.absorb(name, r);
    };
    auto base = [&](const std::string& command) {
        RunConfig c;
        c.command = command;
        c.type = cfg.type;
        c.q = cfg.q;
        c.rho = cfg.rho;
        c.r = cfg.r;
        c.cap = cfg.cap;
        c.seed = cfg.seed;
        c.threshold = cfg.threshold;
        return c;
    };
    for (const std::string t : {"A2", "C2", "G2", "A3", "B3", "C3"}) {
        RunConfig c = base("roots");
        c.type = t;
        section("roots " + t, c);
    }
    section("apartment", base("apartment"));
    for (int l = 0; l <= 6; ++l) {
        RunConfig c = base("simplex");
        c.l = l;
        section("simplex l=" + std::to_string(l), c);
    }
    section("permissible", base("permissible"));
    section("group", base("group"));
    section("chars", base("chars"));
    section("blocks", base("blocks"));
    section("verify-ff", base("verify-ff"));
    section("verify-dplus", base("verify-dplus"));
    section("verify-depth-r", base("verify-depth-r"));
    section("stabilize depth-r", base("stabilize"));
    {
        RunConfig c = base("stabilize");
        c.mode = "depth-zero";
        section("stabilize depth-zero", c);
    }
    section("peter-weyl", base("peter-weyl"));
    return rep;
}

}  // namespace

const std::map<std::string, std::vector<std::string>>& capability_table() {
    static const std::map<std::string, std::vector<std::string>> table = {
        {"roots", {"type"}},
        {"apartment", {"type", "radius", "sector", "svg"}},
        {"simplex", {"l"}},
        {"permissible", {"type", "radius", "pairs"}},
        {"group", {"groups", "cap", "elements"}},
        {"chars", {"groups", "cap", "format"}},
        {"blocks", {"groups", "cap", "seed"}},
        {"verify-ff", {"groups", "q", "cap", "seed"}},
        {"verify-dplus", {"type", "rho", "radius", "q", "cap", "threshold", "svg"}},
        {"verify-depth-r", {"type", "r", "radius"}},
        {"stabilize", {"type", "mode", "r", "rho", "probe", "q", "radius", "cap"}},
        {"peter-weyl", {"type", "q", "cap", "seed"}},
        {"all", {"type", "q", "rho", "r", "cap", "seed", "threshold"}},
    };
    return table;
}

RunConfig resolve(RunConfig cfg) {
    if (!capability_table().count(cfg.command)) throw ConfigError("unknown subcommand '" + cfg.command + "'");
    if (cfg.cap == 0) cfg.cap = ep::default_size_cap();
    if (cfg.cap < 1) throw ConfigError("size cap must be positive");
    try {
        ep::CartanType::parse(cfg.type);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    cfg.type = ep::CartanType::parse(cfg.type).name();
    const std::string& c = cfg.command;

    if (!cfg.radius) {
        static const std::map<std::string, int> radii = {{"apartment", 6},      {"permissible", 6},
                                                         {"verify-dplus", 30},  {"verify-depth-r", 15}};
        if (auto it = radii.find(c); it != radii.end()) cfg.radius = it->second;
        if (c == "stabilize") cfg.radius = cfg.mode == "depth-zero" ? 6 : 16;
    }
    if (cfg.radius && *cfg.radius < 0) throw ConfigError("radius must be nonnegative");
    if (c == "permissible" && *cfg.radius < 1) throw ConfigError("permissible scans need radius at least 1");
    if (c == "verify-dplus" && *cfg.radius < 1) throw ConfigError("verify-dplus needs radius at least 1");

    if (cfg.q.empty()) cfg.q = c == "verify-ff" ? std::vector<int>{2, 3} : std::vector<int>{2};
    for (int q : cfg.q) {
        try {
            ep::FiniteField::of_order(q);
        } catch (const std::invalid_argument&) {
            throw ConfigError("q = " + std::to_string(q) + " is not a prime power");
        }
    }
    if (cfg.groups.empty()) cfg.groups = c == "verify-ff" ? kFiniteFieldSuite : std::vector<std::string>{"GL2:2"};
    for (const auto& g : cfg.groups) {
        try {
            parse_group(g);
        } catch (const ConfigError&) {
            throw;
        } catch (const std::invalid_argument& e) {
            throw ConfigError(e.what());
        }
    }
    if (cfg.rho < 0) throw ConfigError("rho must be nonnegative");
    if (cfg.r < 1) throw ConfigError("r must be a positive integer");
    if (cfg.l < 0 || cfg.l > 12) throw ConfigError("l must lie in 0..12");
    if (cfg.format != "json" && cfg.format != "csv") throw ConfigError("format must be json or csv");
    if (cfg.format == "csv" && c != "chars") throw ConfigError("csv output is only available for chars");
    if (cfg.mode != "depth-r" && cfg.mode != "depth-zero") throw ConfigError("mode must be depth-r or depth-zero");
    if (cfg.threshold < -1) throw ConfigError("threshold must be nonnegative");

    const ep::RootSystem rs(ep::CartanType::parse(cfg.type));
    if (cfg.sector < 0 || cfg.sector >= static_cast<int>(rs.positive_systems().size()))
        throw ConfigError("sector must index a positive system (0.." +
                          std::to_string(rs.positive_systems().size() - 1) + ")");
    if (!cfg.svg.empty() && rs.rank() != 2) throw ConfigError("SVG output needs a rank-2 type");
    if (!cfg.probe.empty()) {
        std::sort(cfg.probe.begin(), cfg.probe.end());
        cfg.probe.erase(std::unique(cfg.probe.begin(), cfg.probe.end()), cfg.probe.end());
        if (cfg.probe.front() < 0 || cfg.probe.back() > rs.rank())
            throw ConfigError("probe vertex types must lie in 0.." + std::to_string(rs.rank()));
    }
    if (!cfg.pairs.empty()) parse_pairs(cfg.pairs, rs.rank());
    return cfg;
}

Json config_json(const RunConfig& cfg) {
    const ep::CartanType t = ep::CartanType::parse(cfg.type);
    Json groups = Json::array();
    for (const auto& g : cfg.groups) groups.push_back(g);
    Json j;
    j["command"] = cfg.command;
    j["type"] = cfg.type;
    j["rank"] = t.rank;
    j["q"] = to_json(cfg.q);
    j["radius"] = cfg.radius ? Json(*cfg.radius) : Json(nullptr);
    j["rho"] = cfg.rho;
    j["r"] = cfg.r;
    j["threshold"] = cfg.threshold < 0 ? Json(cfg.rho + 2) : Json(cfg.threshold);
    j["cap"] = cfg.cap;
    j["format"] = cfg.format;
    j["seed"] = cfg.seed;
    j["groups"] = groups;
    j["mode"] = cfg.mode;
    j["probe"] = to_json(cfg.probe);
    j["l"] = cfg.l;
    j["pairs"] = cfg.pairs;
    j["sector"] = cfg.sector;
    j["elements"] = cfg.elements;
    j["svg"] = cfg.svg;
    return j;
}

Report run(const RunConfig& cfg) {
    static const std::map<std::string, std::function<Report(const RunConfig&)>> handlers = {
        {"roots", run_roots},
        {"apartment", run_apartment},
        {"simplex", run_simplex},
        {"permissible", run_permissible},
        {"group", run_group},
        {"chars", run_chars},
        {"blocks", run_blocks},
        {"verify-ff", run_verify_ff},
        {"verify-dplus", run_verify_dplus},
        {"verify-depth-r", run_verify_depth_r},
        {"stabilize", run_stabilize},
        {"peter-weyl", run_peter_weyl},
        {"all", run_all},
    };
    return handlers.at(cfg.command)(cfg);
}

std::string chars_csv(const RunConfig& cfg) {
    std::string out;
    for (const auto& spec : cfg.groups) {
        const auto req = parse_group(spec);
        const auto g = ep::build_group(req.kind, req.q, cfg.cap);
        const auto t = ep::character_table(g->group_ptr());
        out += fmt::format("# {} conductor={}\n", g->name(), t.conductor);
        out += "character,degree";
        for (std::size_t c = 0; c < t.class_sizes.size(); ++c) out += fmt::format(",class{}", c);
        out += "\n";
        out += "size,";
        for (int s : t.class_sizes) out += fmt::format(",{}", s);
        out += "\n";
        for (int chi = 0; chi < t.size(); ++chi) {
            out += fmt::format("{},{}", chi, t.degrees[chi]);
            for (const auto& v : t.values[chi]) {
                std::string cell;
                for (const auto& s : v.to_strings()) cell += (cell.empty() ? "" : " ") + s;
                out += ",[" + cell + "]";
            }
            out += "\n";
        }
    }
    return out;
}

}  // namespace epv
