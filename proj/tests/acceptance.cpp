// Acceptance suite: exercises the CLI and the library end to end on the
// worked n=4 instance and the property checks, printing one line per
// criterion. Usage: cbm_acceptance <cli-path> <scratch-dir>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include <sys/wait.h>

#include "cbm/certificate.hpp"
#include "oracles.hpp"

using namespace cbm;

namespace {

std::string g_cli, g_scratch;
bool g_all_pass = true;

int run(const std::string& cmd) {
    int rc = std::system(cmd.c_str());
    if (rc == -1) return -1;
    if (WIFEXITED(rc)) return WEXITSTATUS(rc);
    return rc;
}

void report(int k, bool pass, const std::string& note = "") {
    std::cout << "CRITERION " << k << ": " << (pass ? "PASS" : "FAIL");
    if (!note.empty()) std::cout << "  (" << note << ")";
    std::cout << std::endl;
    if (!pass) g_all_pass = false;
}

template <typename F>
void criterion(int k, F body) {
    try {
        body();
    } catch (const std::exception& e) {
        report(k, false, std::string("exception: ") + e.what());
    }
}

Json load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path);
    return Json::parse(in);
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

bool brute_transversal(const std::vector<F2Subset>& sets) {
    size_t t = sets.size();
    std::vector<size_t> idx(t, 0);
    for (;;) {
        std::vector<uint32_t> pick;
        for (size_t i = 0; i < t; ++i) pick.push_back(sets[i].members[idx[i]]);
        if (f2_rank(pick) == int(t)) return true;
        size_t i = 0;
        while (i < t && ++idx[i] == sets[i].members.size()) idx[i++] = 0;
        if (i == t) return false;
    }
}

}  // namespace

int main(int argc, char** argv) {
    if (argc < 3) {
        std::cerr << "usage: cbm_acceptance <cli-path> <scratch-dir>\n";
        return 2;
    }
    g_cli = argv[1];
    g_scratch = argv[2];
    const std::string cert_path = g_scratch + "/cert.json";

    // 1. worked-instance reproduction via the CLI
    criterion(1, [&] {
        auto t0 = std::chrono::steady_clock::now();
        int rc = run("'" + g_cli + "' construct --n 4 --q 5 --p 1873 --out '" + cert_path +
                     "' > '" + g_scratch + "/construct.log' 2>&1");
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        Json cert = load(cert_path);
        bool ok = (rc == 0) && secs < 300.0;
        bool saw_p = false;
        for (auto& e : cert.at("place_images")) {
            std::string place = e.at("place").get<std::string>();
            auto vecs = e.at("vectors").get<std::vector<uint32_t>>();
            if (place == "1873") {
                saw_p = true;
                ok = ok && vecs.size() == 15;
            } else {
                ok = ok && vecs == std::vector<uint32_t>{0};
            }
        }
        ok = ok && saw_p;
        ok = ok && cert.at("verdict").at("obstructed").get<bool>();
        ok = ok && cert.at("verdict").at("min_generators").get<int>() == 4;
        ok = ok && cert.at("verified").get<bool>();
        std::ostringstream note;
        note << "construct exit " << rc << ", " << int(secs) << "s";
        report(1, ok, note.str());
    });

    // 2. parameter conditions at (4, 5, 1873), exact
    criterion(2, [&] {
        bool ok = 1873 % 8 == 1;
        ok = ok && legendre(Int(1873), 5) == -1;
        for (uint64_t l : {3ull, 7ull, 11ull}) ok = ok && legendre(Int(1873), l) == 1;
        auto rc = realization_counts(tilde_factors(4, 5), 1873);
        for (uint64_t c : rc.counts) ok = ok && c > 0;
        report(2, ok);
    });

    // 3. the published psi image realizes exactly E
    criterion(3, [&] {
        std::vector<uint64_t> image{3, 6, 7, 11, 15, 20, 22, 26, 29, 31, 33, 35, 41, 61, 195};
        auto tilde = tilde_factors(4, 5);
        uint64_t p = 1873;
        std::vector<char> is_sq(p, 0);
        for (uint64_t t = 1; t < p; ++t) is_sq[mulmod(t, t, p)] = 1;
        std::set<uint32_t> masks;
        bool ok = true;
        for (uint64_t c : image) {
            uint32_t mask = 0;
            for (size_t i = 0; i < tilde.size(); ++i) {
                uint64_t v = to_mod(tilde[i].eval(Int(c)), p);
                if (v == 0) ok = false;
                if (!is_sq[v]) mask |= 1u << i;
            }
            masks.insert(mask);
        }
        auto E = target_set_E(4);
        std::vector<uint32_t> got(masks.begin(), masks.end());
        ok = ok && got == E.elements;
        report(3, ok);
    });

    // 4. smallest-p report present and internally consistent
    criterion(4, [&] {
        Json cert = load(cert_path);
        uint64_t smallest = cert.at("p_search").at("smallest_p").get<uint64_t>();
        bool matches = cert.at("p_search").at("matches_selected_p").get<bool>();
        bool ok = matches == (smallest == 1873);
        std::ostringstream note;
        note << "smallest operational p = " << smallest
             << (matches ? ", agrees with 1873" : ", DIFFERS from 1873 (reported, not a failure)");
        report(4, ok, note.str());
    });

    // 5. Hilbert closed form vs brute-force oracle; product formula
    criterion(5, [&] {
        auto t0 = std::chrono::steady_clock::now();
        auto vals = cbm_test::squarefree_values(50);
        std::vector<Place> places{Place::make_real(), Place::prime(2),  Place::prime(3),
                                  Place::prime(5),    Place::prime(7), Place::prime(11)};
        bool ok = true;
        for (int a : vals)
            for (int b : vals)
                for (auto& v : places)
                    if (hilbert_symbol(Rat(a), Rat(b), v) != cbm_test::hilbert_oracle(Rat(a), Rat(b), v))
                        ok = false;
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        ok = ok && secs < 60.0;
        std::mt19937 rng(987654321);
        std::uniform_int_distribution<int> d(-500, 500);
        int done = 0;
        while (done < 1000) {
            int a = d(rng), b = d(rng);
            if (a == 0 || b == 0) continue;
            check_product_formula(Rat(a), Rat(b));  // throws on a nonzero sum
            ++done;
        }
        std::ostringstream note;
        note << "sweep " << int(secs) << "s";
        report(5, ok, note.str());
    });

    // 6. disk engine equals F_p enumeration at p = 1873
    criterion(6, [&] {
        auto params = build_params(4, 5, 1873);
        auto X = assemble(params);
        auto disks = local_image_disks(X, Place::prime(1873), 64);
        auto enumerated = local_image_enumerate_p(X, 1873);
        report(6, disks.vectors == enumerated.vectors);
    });

    // 7. sumset suite: sharp examples, transversal dichotomy, verdict equivalence
    criterion(7, [&] {
        bool ok = true;
        for (int n = 1; n <= 16; ++n) {
            SharpExample ex = sharp_example(n);
            F2Subset sum = ex.sets.empty() ? F2Subset(n, {0}) : minkowski_sum(ex.sets);
            uint32_t full = (n < 32) ? (uint32_t(1) << n) : 0;
            ok = ok && sum.size() == size_t(full) - 1;
            ok = ok && !sum.contains(ex.excluded);
        }
        std::mt19937 rng(13131313);
        int trials = 0;
        while (trials < 10000) {
            int n = 2 + int(rng() % 4), t = 1 + int(rng() % 5);
            std::vector<F2Subset> sets;
            bool usable = true;
            for (int i = 0; i < t; ++i) {
                std::vector<uint32_t> mem{0};
                for (int j = 0, extra = 1 + int(rng() % 5); j < extra; ++j)
                    mem.push_back(rng() % (uint32_t(1) << n));
                F2Subset s(n, mem);
                if (s.size() < 2) { usable = false; break; }
                sets.push_back(s);
            }
            if (!usable) continue;
            ++trials;
            bool has_tr = independent_transversal(sets).has_value();
            bool has_sub = find_subspace_sum(sets).has_value();
            ok = ok && has_tr == brute_transversal(sets);
            ok = ok && (has_tr || has_sub);  // dichotomy
        }
        for (int n = 1; n <= 3; ++n) {
            uint32_t full = uint32_t(1) << n;
            for (uint32_t sub = 1; sub < (uint32_t(1) << full); ++sub) {
                std::vector<uint32_t> mem;
                for (uint32_t x = 0; x < full; ++x)
                    if (sub & (1u << x)) mem.push_back(x);
                F2Subset S(n, mem);
                auto rep = obstruction_verdict(S);
                ok = ok && rep.obstructed == !S.contains(0);
                ok = ok && rep.full_group_required == (rep.obstructed && S.size() == full - 1);
            }
        }
        report(7, ok);
    });

    // 8. negative controls: single-field corruption must fail verification
    criterion(8, [&] {
        Json cert = load(cert_path);
        bool ok = true;

        Json bad_g = cert;
        bad_g["g_coeffs"][1] = "12345";
        { std::ofstream(g_scratch + "/bad_g.json") << serialize_certificate(bad_g); }
        ok = ok && run("'" + g_cli + "' verify '" + g_scratch + "/bad_g.json' > '" + g_scratch +
                       "/v1.log' 2>&1") == 1;

        Json bad_psi = cert;
        bad_psi["psi_image"][0] = bad_psi["psi_image"][0].get<uint64_t>() + 1;
        { std::ofstream(g_scratch + "/bad_psi.json") << serialize_certificate(bad_psi); }
        ok = ok && run("'" + g_cli + "' verify '" + g_scratch + "/bad_psi.json' > '" + g_scratch +
                       "/v2.log' 2>&1") == 1;

        Json bad_sp = cert;
        for (auto& e : bad_sp["place_images"])
            if (e["place"] == "1873") e["vectors"].erase(e["vectors"].size() - 1);
        { std::ofstream(g_scratch + "/bad_sp.json") << serialize_certificate(bad_sp); }
        ok = ok && run("'" + g_cli + "' verify '" + g_scratch + "/bad_sp.json' > '" + g_scratch +
                       "/v3.log' 2>&1") == 1;

        std::string text = slurp(cert_path);
        { std::ofstream(g_scratch + "/truncated.json") << text.substr(0, text.size() / 2); }
        ok = ok && run("'" + g_cli + "' verify '" + g_scratch + "/truncated.json' > '" + g_scratch +
                       "/v4.log' 2>&1") == 3;

        report(8, ok);
    });

    // 9. realization-count equidistribution window
    criterion(9, [&] {
        auto rc = realization_counts(tilde_factors(4, 5), 1873);
        double expect = 1873.0 / 32.0, window = 15.0 * std::sqrt(1873.0);
        bool ok = rc.counts.size() == 32;
        for (uint64_t c : rc.counts) ok = ok && std::abs(double(c) - expect) <= window;
        report(9, ok);
    });

    return g_all_pass ? 0 : 1;
}
