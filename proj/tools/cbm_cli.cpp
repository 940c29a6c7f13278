// cbm: construct conic bundles with prescribed Brauer-Manin obstruction
// rank, emit and verify JSON certificates, and expose the local engines.
//
// Exit codes: 0 verified, 1 falsified, 2 inconclusive, 3 I/O or parse error.
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "cbm/certificate.hpp"

namespace {

constexpr int kExitVerified = 0;
constexpr int kExitFalsified = 1;
constexpr int kExitInconclusive = 2;
constexpr int kExitIoError = 3;

cbm::Place parse_place(const std::string& s) {
    if (s == "real" || s == "inf" || s == "oo") return cbm::Place::make_real();
    return cbm::Place::prime(std::stoull(s));
}

cbm::Rat parse_rat(const std::string& s) {
    cbm::Rat r(s);
    if (r == 0) throw std::invalid_argument("zero argument rejected");
    return r;
}

std::optional<cbm::Json> load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) return std::nullopt;
    cbm::Json j = cbm::Json::parse(in, nullptr, false);
    if (j.is_discarded()) return std::nullopt;
    return j;
}

void print_image(const cbm::LocalImage& im) {
    std::cout << "place " << cbm::place_key(im.place) << "\n";
    std::cout << "method " << cbm::method_name(im.method) << "\n";
    std::cout << "depth " << im.depth_used << "\n";
    std::cout << "vectors";
    for (uint32_t v : im.vectors) std::cout << " " << v;
    std::cout << "\n";
}

int cmd_construct(int n, uint64_t q, uint64_t p, uint64_t search_limit, int max_depth,
                  const std::string& out_path) {
    if (q == 0) q = cbm::find_q(n);
    if (p == 0) p = cbm::find_p(n, q, search_limit).p;
    cbm::CertificateBundle B = cbm::make_certificate(n, q, p, search_limit, max_depth);
    std::ofstream out(out_path);
    if (!out) {
        std::cerr << "cannot write " << out_path << "\n";
        return kExitIoError;
    }
    out << cbm::serialize_certificate(B.doc);
    std::cout << "n=" << n << " q=" << q << " p=" << p << "\n";
    std::cout << "smallest operational p: " << B.doc["p_search"]["smallest_p"]
              << (B.doc["p_search"]["matches_selected_p"].get<bool>() ? " (matches selected p)"
                                                                      : " (differs from selected p)")
              << "\n";
    std::cout << "obstructed: " << (B.theorem.verdict.obstructed ? "yes" : "no")
              << ", min_generators: " << B.theorem.verdict.min_generators << "\n";
    std::cout << "certificate written to " << out_path << "\n";
    return B.verified ? kExitVerified : kExitFalsified;
}

int cmd_verify(const std::string& cert_path) {
    auto j = load_json(cert_path);
    if (!j) {
        std::cerr << "cannot read or parse " << cert_path << "\n";
        return kExitIoError;
    }
    int r = cbm::verify_certificate(*j);
    std::cout << (r == 0 ? "certificate verified" : "certificate FAILED verification") << "\n";
    return r == 0 ? kExitVerified : kExitFalsified;
}

int cmd_local_image(const std::string& cert_path, const std::string& place_str, int max_depth) {
    auto j = load_json(cert_path);
    if (!j) {
        std::cerr << "cannot read or parse " << cert_path << "\n";
        return kExitIoError;
    }
    int n = j->at("n").get<int>();
    uint64_t p = j->at("p").get<uint64_t>();
    uint64_t q = j->at("q").get<uint64_t>();
    cbm::ConstructionParams params = cbm::build_params(n, q, p);
    cbm::ConicBundle X = cbm::assemble(params);
    cbm::Place v = parse_place(place_str);
    cbm::LocalImage im;
    if (v.real) {
        im = cbm::local_image_real(X);
    } else if (v.p == p) {
        im = cbm::local_image_enumerate_p(X, p);
    } else if (auto sc = cbm::local_image_square_shortcut(X, v)) {
        im = *sc;
    } else {
        im = cbm::local_image_disks(X, v, max_depth);
    }
    print_image(im);
    return kExitVerified;
}

int cmd_hilbert(const std::string& a_str, const std::string& b_str,
                const std::string& place_str) {
    cbm::Rat a = parse_rat(a_str), b = parse_rat(b_str);
    if (!place_str.empty()) {
        cbm::Place v = parse_place(place_str);
        int s = cbm::hilbert_symbol(a, b, v);
        std::cout << "symbol " << (s > 0 ? "+1" : "-1") << "\n";
        std::cout << "inv " << (s > 0 ? "0" : "1/2") << "\n";
    } else {
        cbm::ProductFormulaReport rep = cbm::check_product_formula(a, b);
        std::cout << rep.str();
    }
    return kExitVerified;
}

std::vector<cbm::F2Subset> load_sets(const std::string& path, int& n) {
    auto j = load_json(path);
    if (!j) throw std::runtime_error("cannot read or parse " + path);
    n = j->at("n").get<int>();
    std::vector<cbm::F2Subset> sets;
    for (auto& s : j->at("sets"))
        sets.emplace_back(n, s.get<std::vector<uint32_t>>());
    return sets;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"conic bundles with prescribed Brauer-Manin obstruction rank"};
    app.require_subcommand(1);

    int n = 4;
    uint64_t q = 0, p = 0, search_limit = 10000;
    int max_depth = 64;
    std::string out_path = "cert.json", cert_path, place_str, a_str, b_str, input_path;

    auto* construct = app.add_subcommand("construct", "build an instance and emit a certificate");
    construct->add_option("--n", n, "number of required generators")->required()->check(CLI::Range(2, 8));
    construct->add_option("--q", q, "prime q > n (searched when omitted)");
    construct->add_option("--p", p, "prime p (searched when omitted)");
    construct->add_option("--search-limit", search_limit, "bound for the p search");
    construct->add_option("--max-depth", max_depth, "disk subdivision depth limit");
    construct->add_option("--out", out_path, "certificate output path");

    auto* verify = app.add_subcommand("verify", "recompute and check a certificate");
    verify->add_option("cert", cert_path, "certificate path")->required();

    auto* local = app.add_subcommand("local-image", "print S_v for one place");
    local->add_option("cert", cert_path, "certificate path")->required();
    local->add_option("--place", place_str, "real or a prime")->required();
    local->add_option("--max-depth", max_depth, "disk subdivision depth limit");

    auto* hilbert = app.add_subcommand("hilbert", "Hilbert symbol or product-formula table");
    hilbert->add_option("a", a_str, "nonzero rational")->required();
    hilbert->add_option("b", b_str, "nonzero rational")->required();
    hilbert->add_option("--place", place_str, "real or a prime (omit for the full table)");

    auto* sumset = app.add_subcommand("sumset", "F_2^n combinatorics");
    sumset->require_subcommand(1);
    auto* sharp = sumset->add_subcommand("sharp-example", "n-1 sets summing to F_2^n minus one vector");
    sharp->add_option("--n", n, "dimension")->required()->check(CLI::Range(1, 16));
    auto* verdict = sumset->add_subcommand("verdict", "obstruction report for a family of sets");
    verdict->add_option("--input", input_path, "JSON file {n, sets}")->required();
    auto* transversal = sumset->add_subcommand("transversal", "independent transversal of a family");
    transversal->add_option("--input", input_path, "JSON file {n, sets}")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (construct->parsed())
            return cmd_construct(n, q, p, search_limit, max_depth, out_path);
        if (verify->parsed()) return cmd_verify(cert_path);
        if (local->parsed()) return cmd_local_image(cert_path, place_str, max_depth);
        if (hilbert->parsed()) return cmd_hilbert(a_str, b_str, place_str);
        if (sumset->parsed()) {
            if (sharp->parsed()) {
                cbm::SharpExample ex = cbm::sharp_example(n);
                for (auto& s : ex.sets) {
                    std::cout << "set";
                    for (uint32_t v : s.members) std::cout << " " << v;
                    std::cout << "\n";
                }
                std::cout << "missing " << ex.excluded << "\n";
                return kExitVerified;
            }
            int dim = 0;
            std::vector<cbm::F2Subset> sets = load_sets(input_path, dim);
            if (verdict->parsed()) {
                cbm::F2Subset S = cbm::minkowski_sum(sets);
                cbm::ObstructionReport rep = cbm::obstruction_verdict(S);
                std::cout << "obstructed " << (rep.obstructed ? "yes" : "no") << "\n";
                std::cout << "full_group_required " << (rep.full_group_required ? "yes" : "no") << "\n";
                std::cout << "min_generators " << rep.min_generators << "\n";
                return kExitVerified;
            }
            auto t = cbm::independent_transversal(sets);
            if (t) {
                std::cout << "transversal";
                for (uint32_t v : *t) std::cout << " " << v;
                std::cout << "\n";
            } else {
                std::cout << "none\n";
            }
            return kExitVerified;
        }
    } catch (const cbm::InconclusiveError& e) {
        std::cerr << "inconclusive: " << e.what() << "\n";
        for (auto& d : e.details) std::cerr << "  " << d << "\n";
        return kExitInconclusive;
    } catch (const std::runtime_error& e) {
        std::string msg = e.what();
        std::cerr << "error: " << msg << "\n";
        if (msg.find("cannot read") != std::string::npos || msg.find("parse") != std::string::npos)
            return kExitIoError;
        return kExitInconclusive;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitFalsified;
    }
    return kExitIoError;
}
