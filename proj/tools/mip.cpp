#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "mipcert/parser.hpp"
#include "mipcert/verify.hpp"

using namespace mipcert;
using json = nlohmann::json;

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out << content;
}

void emit(const json& j, const std::string& format, const std::string& text_form,
          const std::string& out_path) {
    const std::string payload = format == "json" ? j.dump(2) + "\n" : text_form;
    if (out_path.empty())
        std::cout << payload;
    else
        write_file(out_path, payload);
}

struct CommonOpts {
    int n = 0;
    int m = 0;
    std::string format = "text";
    std::string out;
    std::uint64_t seed = 1;
    std::string presentation_path;
    bool exhaustive_set = false;
    bool exhaustive = false;

    verify::Options verify_options() const {
        verify::Options o;
        o.seed = seed;
        if (exhaustive_set)
            o.mult_policy = exhaustive ? verify::Options::MultPolicy::exhaustive
                                       : verify::Options::MultPolicy::sampled;
        return o;
    }
};

void add_nm(CLI::App* cmd, CommonOpts& o, bool required = true) {
    auto* n = cmd->add_option("--n", o.n, "first parameter (n > m > 2)");
    auto* m = cmd->add_option("--m", o.m, "second parameter");
    if (required) {
        n->required();
        m->required();
    }
}

json group_facts(const pc::Group& g) {
    json j;
    j["order"] = g.order();
    j["generators"] = json::array();
    for (std::size_t i = 0; i < g.ngens(); ++i) {
        j["generators"].push_back({{"name", g.presentation().name(i)},
                                   {"relative_order", g.presentation().relative_order(i)}});
    }
    const pc::Subgroup d = pc::derived_subgroup(g);
    const pc::Subgroup z = pc::center(g);
    j["derived_order"] = d.order();
    j["center_order"] = z.order();
    j["class_count"] = pc::conjugacy_classes(g).size();
    std::uint64_t exponent = 1;
    for (std::uint32_t u = 0; u < g.order(); ++u)
        exponent = std::max(exponent, g.element_order(u));
    j["exponent"] = exponent;
    j["frattini_index"] = g.order() / pc::frattini(g).order();
    return j;
}

int cmd_groups(const CommonOpts& o) {
    json j;
    std::ostringstream text;
    if (!o.presentation_path.empty()) {
        const auto doc = parser::parse_presentation(read_file(o.presentation_path));
        auto grp = std::make_shared<pc::Group>(doc.presentation);
        j["group"] = group_facts(*grp);
        j["consistent"] = true;
        if (grp->order() <= pc::Group::kTableLimit) {
            alg::GroupAlgebra a(grp);
            j["fingerprint"] = verify::algebra_invariant_fingerprint(a).to_json();
        }
        text << "group of order " << grp->order() << ", consistent presentation\n"
             << j.dump(2) << "\n";
        emit(j, o.format, text.str(), o.out);
        return 0;
    }

    const auto inst = verify::build_instance(o.n, o.m);
    const auto consG = pc::consistency_check(inst.G->presentation());
    const auto consH = pc::consistency_check(inst.H->presentation());
    const auto noniso = verify::verify_nonisomorphism(*inst.G, *inst.H, o.n, o.m);
    j["n"] = o.n;
    j["m"] = o.m;
    j["G"] = group_facts(*inst.G);
    j["H"] = group_facts(*inst.H);
    j["consistent"] = {{"G", consG.ok}, {"H", consH.ok}};
    j["non_isomorphism"] = {{"status", verify::to_string(noniso.status)},
                            {"witness", noniso.witness}};
    j["fingerprints"] = {{"kG", verify::algebra_invariant_fingerprint(*inst.kG).to_json()},
                         {"kH", verify::algebra_invariant_fingerprint(*inst.kH).to_json()}};
    text << "G(" << o.n << "," << o.m << "), H(" << o.n << "," << o.m << "): order "
         << inst.G->order() << "\n"
         << "consistent: G=" << consG.ok << " H=" << consH.ok << "\n"
         << "non-isomorphism: " << verify::to_string(noniso.status) << " "
         << noniso.witness.dump() << "\n"
         << "fingerprint kG: " << j["fingerprints"]["kG"].dump() << "\n"
         << "fingerprint kH: " << j["fingerprints"]["kH"].dump() << "\n";
    emit(j, o.format, text.str(), o.out);
    return noniso.ok() && consG.ok && consH.ok ? 0 : 1;
}

int cmd_verify(const CommonOpts& o) {
    const auto res = verify::run_verification(o.n, o.m, o.verify_options());
    emit(res.report.to_json(), o.format, res.report.to_text(), o.out);
    return res.report.all_verified() ? 0 : 1;
}

int cmd_certify(const CommonOpts& o) {
    const auto res = verify::run_verification(o.n, o.m, o.verify_options());
    if (!res.report.all_verified() || !res.certificate) {
        std::cerr << "verification failed; no certificate emitted\n"
                  << res.report.to_text();
        return 1;
    }
    write_file(o.out, verify::encode_certificate(*res.certificate));
    std::cout << "certificate for (n, m) = (" << o.n << ", " << o.m << ") written to "
              << o.out << " (" << res.certificate->phi.rows << "x"
              << res.certificate->phi.cols << ", multiplicativity "
              << res.report.mult_policy << ")\n";
    return 0;
}

int cmd_check_cert(const CommonOpts& o, const std::string& cert_path) {
    const auto check = verify::verify_certificate(read_file(cert_path), o.verify_options());
    json j = {{"ok", check.ok},
              {"n", check.n},
              {"m", check.m},
              {"failures", check.failures},
              {"mult_mode", check.mult.mode},
              {"pairs_checked", check.mult.pairs_checked},
              {"seed", o.seed}};
    std::ostringstream text;
    text << "certificate " << (check.ok ? "VALID" : "INVALID") << "\n";
    for (const auto& f : check.failures) text << "  " << f << "\n";
    if (check.ok)
        text << "  (n, m) = (" << check.n << ", " << check.m << "), multiplicativity "
             << check.mult.mode << " on " << check.mult.pairs_checked << " pairs\n";
    emit(j, o.format, text.str(), o.out);
    return check.ok ? 0 : 1;
}

int cmd_jennings(const CommonOpts& o) {
    json j;
    std::ostringstream text;
    auto describe = [&](const std::string& label, const alg::GroupAlgebra& a) {
        const auto f = a.ideal_filtration();
        json dims = json::array();
        for (const auto& layer : f.layers) dims.push_back(layer.dim());
        j[label] = {{"layer_dims", dims},
                    {"quotient_dims", f.quotient_dims()},
                    {"nilpotency_index", f.nilpotency_index}};
        text << label << ": nilpotency index " << f.nilpotency_index << "\n  dim I^k:";
        for (const auto& layer : f.layers) text << " " << layer.dim();
        text << "\n";
    };
    if (!o.presentation_path.empty()) {
        const auto doc = parser::parse_presentation(read_file(o.presentation_path));
        auto grp = std::make_shared<pc::Group>(doc.presentation);
        describe("algebra", alg::GroupAlgebra(grp));
    } else {
        const auto inst = verify::build_instance(o.n, o.m);
        describe("kG", *inst.kG);
        describe("kH", *inst.kH);
        j["agree"] = j["kG"]["quotient_dims"] == j["kH"]["quotient_dims"];
        text << "dimension sequences " << (j["agree"].get<bool>() ? "agree" : "DIFFER")
             << "\n";
    }
    emit(j, o.format, text.str(), o.out);
    return 0;
}

int cmd_oracle_iso(const CommonOpts& o) {
    const auto inst = verify::build_instance(o.n, o.m);
    const auto res = verify::brute_force_iso_search(*inst.G, *inst.H, o.n, o.m);
    json j = {{"found", res.found},
              {"pairs_scanned", res.pairs_scanned},
              {"relation_survivors", res.relation_survivors}};
    std::ostringstream text;
    if (res.found) {
        j["image_x"] = inst.H->element_name(res.image_x);
        j["image_y"] = inst.H->element_name(res.image_y);
        text << "isomorphism FOUND: x -> " << inst.H->element_name(res.image_x)
             << ", y -> " << inst.H->element_name(res.image_y) << "\n";
    } else {
        text << "exhaustion: no isomorphism G(" << o.n << "," << o.m << ") -> H(" << o.n
             << "," << o.m << ") (" << res.pairs_scanned << " generator-image pairs, "
             << res.relation_survivors << " satisfied the relations, none generated H)\n";
    }
    emit(j, o.format, text.str(), o.out);
    return res.found ? 1 : 0;
}

int cmd_eval(const CommonOpts& o, const std::string& which, const std::string& expr) {
    std::shared_ptr<const pc::Group> grp;
    if (!o.presentation_path.empty()) {
        const auto doc = parser::parse_presentation(read_file(o.presentation_path));
        grp = std::make_shared<pc::Group>(doc.presentation);
    } else if (which == "G") {
        grp = std::make_shared<pc::Group>(pc::build_G(o.n, o.m));
    } else if (which == "H") {
        grp = std::make_shared<pc::Group>(pc::build_H(o.n, o.m));
    } else {
        throw CLI::ValidationError("--group must be G or H");
    }
    alg::GroupAlgebra a(grp);
    const auto v = parser::parse_algebra_literal(expr, a);
    json j = {{"expr", expr},
              {"augmentation", a.augmentation(v)},
              {"support_size", v.popcount()},
              {"element", a.format_element(v, 64)},
              {"support", v.set_bits()}};
    std::ostringstream text;
    text << a.format_element(v, 64) << "\n  augmentation " << a.augmentation(v)
         << ", support size " << v.popcount() << "\n";
    emit(j, o.format, text.str(), o.out);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"construction and verification tool for the pair of 2-groups G(n,m), "
                 "H(n,m): proves them non-isomorphic and certifies that their group "
                 "algebras over the 2-element field are isomorphic"};
    app.require_subcommand(1);

    CommonOpts o;
    std::string cert_path, group_choice = "H", expr;

    auto add_common = [&](CLI::App* cmd, bool nm_required = true) {
        add_nm(cmd, o, nm_required);
        cmd->add_option("--format", o.format, "output format")
            ->check(CLI::IsMember({"text", "json"}));
        cmd->add_option("--out", o.out, "write output to this path");
        return cmd;
    };
    auto add_seeded = [&](CLI::App* cmd) {
        cmd->add_option("--seed", o.seed, "seed for sampled checks (recorded in reports)");
        cmd->add_option_function<bool>(
               "--exhaustive-mult",
               [&o](const bool v) {
                   o.exhaustive_set = true;
                   o.exhaustive = v;
               },
               "force exhaustive (true) or sampled (false) multiplicativity checking");
        return cmd;
    };

    auto* groups = add_common(app.add_subcommand("groups", "build both groups and print "
                                                           "their invariants"),
                              false);
    groups->add_option("--presentation", o.presentation_path,
                       "describe a single group from a presentation file instead");

    auto* verify_cmd = add_seeded(add_common(
        app.add_subcommand("verify", "run the full verification pipeline")));

    auto* certify = add_seeded(add_common(
        app.add_subcommand("certify", "run the pipeline and emit a certificate file")));
    certify->get_option("--out")->required();

    auto* check = add_seeded(add_common(
        app.add_subcommand("check-cert", "independently re-verify a certificate file"),
        false));
    check->add_option("--cert", cert_path, "certificate file")->required();

    auto* jennings = add_common(
        app.add_subcommand("jennings", "augmentation-ideal filtration dimensions"), false);
    jennings->add_option("--presentation", o.presentation_path,
                         "use a presentation file instead of (n, m)");

    add_common(app.add_subcommand("oracle-iso",
                                  "exhaustive generator-image isomorphism search"));

    auto* eval = add_common(app.add_subcommand("eval", "evaluate an algebra element "
                                                       "literal and print its support"),
                            false);
    eval->add_option("--group", group_choice, "which algebra: G or H");
    eval->add_option("--presentation", o.presentation_path,
                     "use a presentation file instead of (n, m)");
    eval->add_option("expr", expr, "literal, e.g. \"b*(a+b+a*b)*c\"")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand("groups")) return cmd_groups(o);
        if (app.got_subcommand("verify")) return cmd_verify(o);
        if (app.got_subcommand("certify")) return cmd_certify(o);
        if (app.got_subcommand("check-cert")) return cmd_check_cert(o, cert_path);
        if (app.got_subcommand("jennings")) return cmd_jennings(o);
        if (app.got_subcommand("oracle-iso")) return cmd_oracle_iso(o);
        if (app.got_subcommand("eval")) return cmd_eval(o, group_choice, expr);
    } catch (const parser::ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
