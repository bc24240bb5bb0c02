#include "mipcert/verify.hpp"

#include <atomic>
#include <chrono>
#include <random>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace mipcert::verify {

using json = nlohmann::json;

namespace {

struct Timer {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    double ms() const {
        return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
            .count();
    }
};

ProofStep make_step(std::string name, std::string statement) {
    ProofStep s;
    s.name = std::move(name);
    s.statement = std::move(statement);
    return s;
}

void finish(ProofStep& s, bool ok, const Timer& t) {
    s.status = ok ? ProofStep::Status::verified : ProofStep::Status::failed;
    s.millis = t.ms();
}

std::string hex16(std::uint64_t v) {
    static const char* d = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = d[v & 0xf];
        v >>= 4;
    }
    return out;
}

}  // namespace

std::uint64_t fnv1a64(std::string_view data) {
    std::uint64_t h = 1469598103934665603ull;
    for (const char c : data) {
        h ^= static_cast<std::uint8_t>(c);
        h *= 1099511628211ull;
    }
    return h;
}

std::string to_string(ProofStep::Status s) {
    switch (s) {
        case ProofStep::Status::verified: return "verified";
        case ProofStep::Status::failed: return "failed";
        case ProofStep::Status::skipped: return "skipped";
    }
    return "?";
}

bool Report::all_verified() const {
    if (steps.empty()) return false;
    for (const auto& s : steps)
        if (!s.ok()) return false;
    return true;
}

const ProofStep* Report::find(std::string_view name) const {
    for (const auto& s : steps)
        if (s.name == name) return &s;
    return nullptr;
}

json Report::to_json() const {
    json out;
    out["schema"] = "mip-report/1";
    out["n"] = n;
    out["m"] = m;
    out["seed"] = seed;
    out["mult_policy"] = mult_policy;
    out["ok"] = all_verified();
    out["steps"] = json::array();
    for (const auto& s : steps) {
        json j;
        j["name"] = s.name;
        j["statement"] = s.statement;
        j["status"] = to_string(s.status);
        j["witness"] = s.witness;
        j["ms"] = s.millis;
        out["steps"].push_back(std::move(j));
    }
    return out;
}

std::string Report::to_text() const {
    std::ostringstream os;
    os << "instance (n, m) = (" << n << ", " << m << "), seed " << seed;
    if (!mult_policy.empty()) os << ", multiplicativity " << mult_policy;
    os << "\n";
    for (const auto& s : steps) {
        os << "  [" << to_string(s.status) << "] " << s.name << ": " << s.statement << "\n";
    }
    os << (all_verified() ? "all steps verified" : "VERIFICATION FAILED") << "\n";
    return os.str();
}

Instance build_instance(int n, int m) {
    Instance inst;
    inst.n = n;
    inst.m = m;
    inst.G = std::make_shared<pc::Group>(pc::build_G(n, m));
    inst.H = std::make_shared<pc::Group>(pc::build_H(n, m));
    inst.kG = std::make_shared<GroupAlgebra>(inst.G);
    inst.kH = std::make_shared<GroupAlgebra>(inst.H);
    return inst;
}

ProofStep verify_nonisomorphism(const pc::Group& G, const pc::Group& H, int n, int m) {
    Timer t;
    ProofStep s = make_step("non-isomorphism",
                            "the centralizers of the derived subgroups are abelian with "
                            "different exponents, so the groups are not isomorphic");
    const pc::Subgroup dG = pc::derived_subgroup(G);
    const pc::Subgroup dH = pc::derived_subgroup(H);
    const pc::Subgroup cG = pc::centralizer(G, dG);
    const pc::Subgroup cH = pc::centralizer(H, dH);
    const bool abG = pc::is_abelian(G, cG);
    const bool abH = pc::is_abelian(H, cH);
    const std::uint64_t eG = pc::subgroup_exponent(G, cG);
    const std::uint64_t eH = pc::subgroup_exponent(H, cH);
    s.witness = {{"derived_orders", {dG.order(), dH.order()}},
                 {"centralizer_orders", {cG.order(), cH.order()}},
                 {"centralizers_abelian", {abG, abH}},
                 {"exponents", {eG, eH}},
                 {"expected_exponents",
                  {std::uint64_t{1} << n, std::uint64_t{1} << (n - 1)}},
                 {"m", m}};
    finish(s, abG && abH && eG != eH, t);
    if (eG == eH) s.witness["note"] = "exponents equal: no non-isomorphism witness";
    return s;
}

TildeGens build_tilde_generators(const GroupAlgebra& kH) {
    const pc::Group& H = kH.group();
    const std::uint32_t a = H.generator(0);
    const std::uint32_t b = H.generator(1);
    const std::uint32_t c = H.generator(2);
    const BitVector ea = kH.embed(a);
    const BitVector eb = kH.embed(b);
    const BitVector inner = ea ^ eb ^ kH.mul(ea, eb);  // a + b + ab
    TildeGens t;
    t.x = ea;
    t.y = kH.mul(kH.mul(eb, inner), kH.embed(c));
    t.z = kH.commutator(t.y, t.x);
    return t;
}

namespace steps {

ProofStep identity_c_in_i2(const GroupAlgebra& kH, const gf2::Subspace& i2) {
    Timer tm;
    ProofStep s = make_step("identity-c-in-I2",
                            "C = b^-1 a^-1 (BA + AB) and C lies in I^2");
    const pc::Group& H = kH.group();
    const std::uint32_t a = H.generator(0), b = H.generator(1), c = H.generator(2);
    const BitVector A = kH.embed_plus_one(a);
    const BitVector B = kH.embed_plus_one(b);
    const BitVector C = kH.embed_plus_one(c);
    const BitVector comm = kH.mul(B, A) ^ kH.mul(A, B);
    const BitVector rhs =
        kH.mul(kH.mul(kH.embed(H.inverse(b)), kH.embed(H.inverse(a))), comm);
    const auto test = gf2::in_span(C, i2);
    s.witness = {{"identity_holds", C == rhs},
                 {"in_I2", test.member},
                 {"residue_weight", test.residue.popcount()}};
    finish(s, C == rhs && test.member, tm);
    return s;
}

ProofStep identity_y_congruent_b(const GroupAlgebra& kH, const TildeGens& t,
                                 const gf2::Subspace& i2) {
    Timer tm;
    ProofStep s = make_step("identity-y-congruent-b", "y~ = b mod I^2");
    const pc::Group& H = kH.group();
    const std::uint32_t a = H.generator(0), b = H.generator(1);
    const auto test = gf2::in_span(t.y ^ kH.embed(b), i2);
    // intermediate from the chain: b + y~ = b(1+a)(1+b) mod I^2, itself in I^2
    const BitVector bAB =
        kH.mul(kH.embed(b), kH.mul(kH.embed_plus_one(a), kH.embed_plus_one(b)));
    const bool inter = i2.contains(bAB);
    s.witness = {{"in_I2", test.member},
                 {"residue_weight", test.residue.popcount()},
                 {"bAB_in_I2", inter}};
    finish(s, test.member && inter, tm);
    return s;
}

ProofStep identity_y_squared(const GroupAlgebra& kH, const TildeGens& t) {
    Timer tm;
    ProofStep s = make_step("identity-y-squared-expansion",
                            "y~ = b^2 c + b a (1+b) c splits into commuting parts and y~^2 "
                            "equals (b^2 c)^2 + a^2 (b^2 c) + a^2 (b^2 c)^2 + a^2 (b^2 c)(b + b c)");
    const pc::Group& H = kH.group();
    auto idx = [&H](std::initializer_list<pc::Letter> w) {
        return H.collect_word(pc::Word(w));
    };
    const std::uint32_t b2c = idx({{1, 2}, {2, 1}});
    const std::uint32_t a2 = idx({{0, 2}});
    const std::uint32_t bidx = H.generator(1);
    const std::uint32_t bc = idx({{1, 1}, {2, 1}});

    const BitVector u = kH.embed(b2c);
    // v = b a (1+b) c
    const BitVector v = kH.mul(
        kH.mul(kH.mul(kH.embed(H.generator(1)), kH.embed(H.generator(0))),
               kH.one() ^ kH.embed(H.generator(1))),
        kH.embed(H.generator(2)));
    const bool split_ok = (u ^ v) == t.y;
    const bool commute = kH.mul(u, v) == kH.mul(v, u);

    const BitVector lhs = kH.square(t.y);
    const bool square_splits = lhs == (kH.square(u) ^ kH.square(v));

    const std::uint32_t b2c_sq = H.mul(b2c, b2c);
    BitVector rhs = kH.embed(b2c_sq);
    rhs ^= kH.embed(H.mul(a2, b2c));
    rhs ^= kH.embed(H.mul(a2, b2c_sq));
    rhs ^= kH.embed(H.mul(H.mul(a2, b2c), bidx));
    rhs ^= kH.embed(H.mul(H.mul(a2, b2c), bc));

    const bool expansion_ok = lhs == rhs;
    s.witness = {{"split_holds", split_ok},
                 {"parts_commute", commute},
                 {"square_splits", square_splits},
                 {"expansion_holds", expansion_ok},
                 {"y_squared_central", kH.is_central(lhs)}};
    finish(s, split_ok && commute && square_splits && expansion_ok, tm);
    return s;
}

ProofStep identity_y_power(const GroupAlgebra& kH, const TildeGens& t, int m) {
    Timer tm;
    ProofStep s = make_step(
        "identity-y-power-expansion",
        "y~^(2^m) equals b^(2^(m+1)) c^(2^m) + a^(2^m)(b^(2^m) c^(2^(m-1)) + b^(2^(m+1)) "
        "c^(2^m)) + a^(2^m) b^(2^m) c^(2^(m-1))(b^(2^(m-1)) + b^(2^(m-1)) c^(2^(m-1))), "
        "which collapses to 1");
    const pc::Group& H = kH.group();
    const std::int64_t q = std::int64_t{1} << m;
    const std::uint32_t a = H.generator(0), b = H.generator(1), c = H.generator(2);
    const std::uint32_t aq = H.power(a, q);
    const std::uint32_t bq = H.power(b, q);
    const std::uint32_t b2q = H.power(b, 2 * q);
    const std::uint32_t bh = H.power(b, q / 2);
    const std::uint32_t cq = H.power(c, q);
    const std::uint32_t ch = H.power(c, q / 2);

    BitVector rhs = kH.embed(H.mul(b2q, cq));
    rhs ^= kH.embed(H.mul(aq, H.mul(bq, ch)));
    rhs ^= kH.embed(H.mul(aq, H.mul(b2q, cq)));
    const std::uint32_t stem = H.mul(aq, H.mul(bq, ch));
    rhs ^= kH.embed(H.mul(stem, bh));
    rhs ^= kH.embed(H.mul(stem, H.mul(bh, ch)));

    const BitVector lhs = kH.pow(t.y, std::uint64_t{1} << m);
    const bool matches = lhs == rhs;
    const bool is_one = rhs == kH.one();
    s.witness = {{"expansion_matches", matches}, {"expansion_is_one", is_one}};
    finish(s, matches && is_one, tm);
    return s;
}

ProofStep burnside_generation(const GroupAlgebra& kH, const TildeGens& t,
                              const gf2::Subspace& aug, const gf2::Subspace& i2) {
    Timer tm;
    ProofStep s = make_step("burnside-ring-generation",
                            "A + I^2 and Y + I^2 span I/I^2, so A and Y generate I as a ring");
    const pc::Group& H = kH.group();
    const BitVector A = kH.embed_plus_one(H.generator(0));
    const BitVector Y = t.y ^ kH.one();
    gf2::Subspace span = i2;
    const bool a_new = span.insert(A);
    const bool y_new = span.insert(Y);
    const bool covers = a_new && y_new && span.dim() == aug.dim();
    const std::vector<BitVector> gens = {A, Y};
    const gf2::Subspace ring = kH.ring_generated_by(gens);
    const bool equals_i = ring == aug;
    s.witness = {{"residues_independent", a_new && y_new},
                 {"span_with_I2_dim", span.dim()},
                 {"aug_ideal_dim", aug.dim()},
                 {"ring_dim", ring.dim()},
                 {"ring_equals_I", equals_i}};
    finish(s, covers && equals_i, tm);
    return s;
}

ProofStep relation_x_power(const GroupAlgebra& kH, const TildeGens& t, int n) {
    Timer tm;
    ProofStep s = make_step("relation-x-power", "x~^(2^n) = 1");
    const bool ok = kH.pow(t.x, std::uint64_t{1} << n) == kH.one();
    s.witness = {{"exponent", std::uint64_t{1} << n}};
    finish(s, ok, tm);
    return s;
}

ProofStep relation_x2_central(const GroupAlgebra& kH, const TildeGens& t) {
    Timer tm;
    ProofStep s = make_step("relation-x2-central", "x~^2 lies in the center of kH");
    finish(s, kH.is_central(kH.square(t.x)), tm);
    return s;
}

ProofStep relation_zx_inverse(const GroupAlgebra& kH, const TildeGens& t) {
    Timer tm;
    ProofStep s = make_step("relation-zx-inverse",
                            "z~^x~ = z~^-1, both directly and via 1 = [y~, x~^2] = z~ z~^x~");
    const auto zi = kH.unit_inverse(t.z);
    const auto xi = kH.unit_inverse(t.x);
    if (!zi || !xi || kH.augmentation(t.y) != 1) {
        s.witness = {{"error", "the tilde elements are not all units"}};
        finish(s, false, tm);
        return s;
    }
    const BitVector conj = kH.conjugate(t.z, t.x, *xi);
    const bool direct = conj == *zi;
    const BitVector route = kH.commutator(t.y, kH.square(t.x));  // [y~, x~^2]
    const bool route_is_one = route == kH.one();
    const bool routes_agree = kH.mul(t.z, conj) == route;
    s.witness = {{"direct", direct},
                 {"commutator_with_x2_is_one", route_is_one},
                 {"product_identity", routes_agree}};
    finish(s, direct && route_is_one && routes_agree, tm);
    return s;
}

ProofStep relation_y2_central(const GroupAlgebra& kH, const TildeGens& t) {
    Timer tm;
    ProofStep s = make_step("relation-y2-central", "y~^2 lies in the center of kH");
    finish(s, kH.is_central(kH.square(t.y)), tm);
    return s;
}

ProofStep relation_zy_inverse(const GroupAlgebra& kH, const TildeGens& t) {
    Timer tm;
    ProofStep s = make_step("relation-zy-inverse",
                            "z~^y~ = z~^-1, both directly and via 1 = [x~, y~^2] = "
                            "z~^-1 (z~^-1)^y~");
    const auto zi = kH.unit_inverse(t.z);
    const auto yi = kH.unit_inverse(t.y);
    if (!zi || !yi || kH.augmentation(t.x) != 1) {
        s.witness = {{"error", "the tilde elements are not all units"}};
        finish(s, false, tm);
        return s;
    }
    const BitVector conj = kH.conjugate(t.z, t.y, *yi);
    const bool direct = conj == *zi;
    const BitVector route = kH.commutator(t.x, kH.square(t.y));  // [x~, y~^2]
    const bool route_is_one = route == kH.one();
    const bool routes_agree = kH.mul(*zi, kH.conjugate(*zi, t.y, *yi)) == route;
    s.witness = {{"direct", direct},
                 {"commutator_with_y2_is_one", route_is_one},
                 {"product_identity", routes_agree}};
    finish(s, direct && route_is_one && routes_agree, tm);
    return s;
}

ProofStep relation_y_power(const GroupAlgebra& kH, const TildeGens& t, int m) {
    Timer tm;
    ProofStep s = make_step("relation-y-power", "y~^(2^m) = 1");
    const bool ok = kH.pow(t.y, std::uint64_t{1} << m) == kH.one();
    s.witness = {{"exponent", std::uint64_t{1} << m}};
    finish(s, ok, tm);
    return s;
}

ProofStep relation_z_fourth(const GroupAlgebra& kH, const TildeGens& t) {
    Timer tm;
    ProofStep s = make_step("relation-z-fourth",
                            "for J the ideal generated by C: kH/J is commutative, "
                            "1 + z~ lies in J, J^4 = 0, hence z~^4 = 1");
    const pc::Group& H = kH.group();
    const BitVector C = kH.embed_plus_one(H.generator(2));
    const gf2::Subspace J = kH.two_sided_ideal(C);

    bool quotient_commutative = true;
    for (std::size_t i = 0; i < H.ngens() && quotient_commutative; ++i)
        for (std::size_t j = i + 1; j < H.ngens() && quotient_commutative; ++j) {
            const BitVector gi = kH.embed(H.generator(i));
            const BitVector gj = kH.embed(H.generator(j));
            quotient_commutative = J.contains(kH.mul(gi, gj) ^ kH.mul(gj, gi));
        }

    const bool z_in_1_plus_j = J.contains(t.z ^ kH.one());
    const gf2::Subspace j2 = kH.ideal_power(J, 2);
    const gf2::Subspace j3 = kH.ideal_power(J, 3);
    const gf2::Subspace j4 = kH.ideal_power(J, 4);
    const bool j4_zero = j4.dim() == 0;
    const bool z4_one = kH.pow(t.z, 4) == kH.one();
    s.witness = {{"J_dims", {J.dim(), j2.dim(), j3.dim(), j4.dim()}},
                 {"quotient_commutative", quotient_commutative},
                 {"one_plus_z_in_J", z_in_1_plus_j},
                 {"J3_nonzero", j3.dim() > 0},
                 {"J4_zero", j4_zero},
                 {"z4_is_one", z4_one}};
    finish(s, quotient_commutative && z_in_1_plus_j && j4_zero && z4_one, tm);
    return s;
}

}  // namespace steps

std::vector<ProofStep> verify_relations(const GroupAlgebra& kH, const TildeGens& t,
                                        int n, int m) {
    std::vector<ProofStep> out;
    out.push_back(steps::relation_x_power(kH, t, n));
    out.push_back(steps::relation_x2_central(kH, t));
    out.push_back(steps::relation_zx_inverse(kH, t));
    out.push_back(steps::relation_y2_central(kH, t));
    out.push_back(steps::relation_zy_inverse(kH, t));
    out.push_back(steps::relation_y_power(kH, t, m));
    out.push_back(steps::relation_z_fourth(kH, t));
    return out;
}

std::vector<ProofStep> verify_identities(const GroupAlgebra& kH, const TildeGens& t,
                                         const gf2::Subspace& aug_ideal,
                                         const gf2::Subspace& i2, int m) {
    std::vector<ProofStep> out;
    out.push_back(steps::identity_c_in_i2(kH, i2));
    out.push_back(steps::identity_y_congruent_b(kH, t, i2));
    out.push_back(steps::identity_y_squared(kH, t));
    out.push_back(steps::identity_y_power(kH, t, m));
    out.push_back(steps::burnside_generation(kH, t, aug_ideal, i2));
    return out;
}

std::optional<GroupBasis> close_group_basis(const GroupAlgebra& kH, const pc::Group& G,
                                            const TildeGens& t, ProofStep& step) {
    Timer tm;
    step = make_step("group-basis-closure",
                     "<x~, y~> closes to |G| distinct units, the labeling by normal "
                     "forms of G is multiplicative, and the members span kH");
    const std::size_t order = static_cast<std::size_t>(G.order());
    if (kH.dim() != order) {
        step.witness = {{"error", "|G| != |H|"}};
        finish(step, false, tm);
        return std::nullopt;
    }
    const BitVector gens_alg[3] = {t.x, t.y, t.z};

    std::unordered_map<BitVector, std::uint32_t, gf2::BitVectorHash> label;
    GroupBasis basis;
    basis.by_g_index.assign(order, BitVector());
    std::vector<char> have(order, 0);
    std::vector<BitVector> queue;

    label.emplace(kH.one(), 0);
    basis.by_g_index[0] = kH.one();
    have[0] = 1;
    queue.push_back(kH.one());

    for (std::size_t head = 0; head < queue.size(); ++head) {
        const BitVector w = queue[head];
        const std::uint32_t wl = label.at(w);
        for (std::size_t i = 0; i < 3; ++i) {
            const BitVector w2 = kH.mul(w, gens_alg[i]);
            const std::uint32_t expected = G.mul(wl, G.generator(i));
            const auto it = label.find(w2);
            if (it != label.end()) {
                if (it->second != expected) {
                    step.witness = {{"error", "labeling not multiplicative"},
                                    {"at", G.element_name(wl)},
                                    {"generator", i}};
                    finish(step, false, tm);
                    return std::nullopt;
                }
                continue;
            }
            if (label.size() == order) {
                step.witness = {{"error", "closure exceeds |G|"}};
                finish(step, false, tm);
                return std::nullopt;
            }
            if (have[expected]) {
                step.witness = {{"error", "two members share the label " +
                                              G.element_name(expected)}};
                finish(step, false, tm);
                return std::nullopt;
            }
            label.emplace(w2, expected);
            basis.by_g_index[expected] = w2;
            have[expected] = 1;
            queue.push_back(w2);
        }
    }

    const std::size_t size = label.size();
    bool all_labeled = size == order;
    for (const char h : have) all_labeled = all_labeled && h;

    std::size_t rank = 0;
    if (all_labeled) {
        gf2::Matrix m(order, kH.dim());
        m.row = basis.by_g_index;
        rank = gf2::rank(m);
    }
    const bool spanning = rank == kH.dim();
    step.witness = {{"closure_size", size},
                    {"distinct_labels", all_labeled},
                    {"span_rank", rank}};
    finish(step, all_labeled && spanning, tm);
    if (!step.ok()) return std::nullopt;
    return basis;
}

Certificate build_certificate(const Instance& inst, const GroupBasis& basis) {
    Certificate cert;
    cert.n = inst.n;
    cert.m = inst.m;
    cert.phi.rows = basis.by_g_index.size();
    cert.phi.cols = inst.kH->dim();
    cert.phi.row = basis.by_g_index;
    return cert;
}

MultCheck check_multiplicative(const Certificate& cert, const pc::Group& G,
                               const GroupAlgebra& kH, Options::MultPolicy policy,
                               std::uint64_t seed, std::size_t sample_pairs) {
    MultCheck res;
    const std::size_t N = cert.phi.rows;
    const auto& rows = cert.phi.row;

    const bool exhaustive =
        policy == Options::MultPolicy::exhaustive ||
        (policy == Options::MultPolicy::automatic && N <= 1024);

    if (exhaustive) {
        res.mode = "exhaustive";
        if (!G.has_table() || !kH.group().has_table())
            throw std::logic_error("exhaustive multiplicativity needs materialized tables");
        const std::uint16_t* TG = G.table().data();
        const std::uint16_t* TH = kH.group().table().data();
        std::vector<std::vector<std::uint32_t>> supports(N);
        for (std::size_t g = 0; g < N; ++g) supports[g] = rows[g].set_bits();

        std::atomic<bool> bad{false};
        std::string failure;
#ifdef _OPENMP
        #pragma omp parallel
#endif
        {
            std::vector<BitVector> tw(N, BitVector(N));
            BitVector acc(N);
#ifdef _OPENMP
            #pragma omp for schedule(dynamic, 4)
#endif
            for (std::size_t h = 0; h < N; ++h) {
                if (bad.load(std::memory_order_relaxed)) continue;
                const auto& sh = supports[h];
                for (std::size_t w = 0; w < N; ++w) {
                    tw[w].clear();
                    const std::uint16_t* rw = TH + w * N;
                    for (const std::uint32_t t : sh) tw[w].set(rw[t]);
                }
                for (std::size_t g = 0; g < N && !bad.load(std::memory_order_relaxed);
                     ++g) {
                    acc.clear();
                    for (const std::uint32_t w : supports[g]) acc ^= tw[w];
                    if (!(acc == rows[TG[g * N + h]])) {
#ifdef _OPENMP
                        #pragma omp critical
#endif
                        {
                            bad = true;
                            failure = "phi(g)phi(h) != phi(gh) at g=" + G.element_name(
                                          static_cast<std::uint32_t>(g)) +
                                      ", h=" + G.element_name(static_cast<std::uint32_t>(h));
                        }
                    }
                }
            }
        }
        res.ok = !bad;
        res.failure = failure;
        res.pairs_checked = static_cast<std::uint64_t>(N) * N;
        return res;
    }

    res.mode = "sampled";
    // all (g, generator) pairs; with associativity these already propagate to
    // every pair, the random sample cross-checks the machinery
    for (std::size_t i = 0; i < G.ngens() && res.ok; ++i) {
        const std::uint32_t h = G.generator(i);
        for (std::size_t g = 0; g < N; ++g) {
            if (!(kH.mul_serial(rows[g], rows[h]) ==
                  rows[G.mul(static_cast<std::uint32_t>(g), h)])) {
                res.ok = false;
                res.failure = "generator pair failed at g index " + std::to_string(g);
                break;
            }
            ++res.pairs_checked;
        }
    }
    if (!res.ok) return res;

    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::uint32_t> dist(0, static_cast<std::uint32_t>(N - 1));
    std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs(sample_pairs);
    for (auto& p : pairs) p = {dist(rng), dist(rng)};

    std::atomic<bool> bad{false};
    std::string failure;
#ifdef _OPENMP
    #pragma omp parallel for schedule(dynamic, 16)
#endif
    for (std::size_t s = 0; s < pairs.size(); ++s) {
        if (bad.load(std::memory_order_relaxed)) continue;
        const auto [g, h] = pairs[s];
        if (!(kH.mul_serial(rows[g], rows[h]) == rows[G.mul(g, h)])) {
#ifdef _OPENMP
            #pragma omp critical
#endif
            {
                bad = true;
                failure = "sampled pair failed at (" + std::to_string(g) + ", " +
                          std::to_string(h) + ")";
            }
        }
    }
    res.ok = !bad;
    if (!res.ok) res.failure = failure;
    res.pairs_checked += pairs.size();
    return res;
}

std::string encode_certificate(const Certificate& cert) {
    const std::uint64_t order = std::uint64_t{1} << (cert.n + cert.m + 2);
    std::string body = "mipcert v1 n=" + std::to_string(cert.n) + " m=" +
                       std::to_string(cert.m) + " order=" + std::to_string(order) + "\n";
    body += gf2::encode(cert.phi);
    body += "checksum fnv1a64 " + hex16(fnv1a64(body)) + "\n";
    return body;
}

Certificate decode_certificate(std::string_view text) {
    const auto cpos = text.rfind("checksum fnv1a64 ");
    if (cpos == std::string_view::npos)
        throw std::invalid_argument("certificate: missing checksum line");
    const std::string_view body = text.substr(0, cpos);
    std::string_view csline = text.substr(cpos);
    if (!csline.empty() && csline.back() == '\n') csline.remove_suffix(1);
    const std::string_view want = csline.substr(std::string_view("checksum fnv1a64 ").size());
    if (want != hex16(fnv1a64(body)))
        throw std::invalid_argument("certificate: checksum mismatch");

    const auto nl = body.find('\n');
    if (nl == std::string_view::npos) throw std::invalid_argument("certificate: bad header");
    const std::string header(body.substr(0, nl));
    Certificate cert;
    std::uint64_t order = 0;
    if (std::sscanf(header.c_str(), "mipcert v1 n=%d m=%d order=%llu", &cert.n, &cert.m,
                    reinterpret_cast<unsigned long long*>(&order)) != 3)
        throw std::invalid_argument("certificate: bad header '" + header + "'");
    cert.phi = gf2::decode_matrix(body.substr(nl + 1));
    if (cert.phi.rows != cert.phi.cols)
        throw std::invalid_argument("certificate: matrix is not square");
    if (order != (std::uint64_t{1} << (cert.n + cert.m + 2)) || cert.phi.rows != order)
        throw std::invalid_argument(
            "certificate: dimension/order mismatch with header parameters");
    return cert;
}

CertCheck verify_certificate(std::string_view file_text, const Options& opt) {
    CertCheck out;
    Certificate cert;
    try {
        cert = decode_certificate(file_text);
    } catch (const std::exception& e) {
        out.ok = false;
        out.failures.emplace_back(e.what());
        return out;
    }
    out.n = cert.n;
    out.m = cert.m;
    Instance inst;
    try {
        inst = build_instance(cert.n, cert.m);
    } catch (const std::exception& e) {
        out.ok = false;
        out.failures.emplace_back(e.what());
        return out;
    }
    if (cert.phi.rows != inst.kG->dim()) {
        out.ok = false;
        out.failures.push_back("matrix dimension does not match |G|");
        return out;
    }
    if (gf2::rank(cert.phi) != cert.phi.rows) {
        out.ok = false;
        out.failures.push_back("matrix is singular");
    }
    if (!(cert.phi.row[0] == BitVector::unit(cert.phi.cols, 0))) {
        out.ok = false;
        out.failures.push_back("phi(1) != 1");
    }
    for (std::size_t g = 0; g < cert.phi.rows; ++g)
        if (!cert.phi.row[g].parity()) {
            out.ok = false;
            out.failures.push_back("row " + std::to_string(g) + " is not a unit");
            break;
        }
    if (out.ok) {
        out.mult = check_multiplicative(cert, *inst.G, *inst.kH, opt.mult_policy, opt.seed,
                                        opt.sample_pairs);
        if (!out.mult.ok) {
            out.ok = false;
            out.failures.push_back("multiplicativity failed: " + out.mult.failure);
        }
    }
    return out;
}

Fingerprint algebra_invariant_fingerprint(const GroupAlgebra& a,
                                          const GroupAlgebra::Filtration* filtration) {
    Fingerprint fp;
    fp.dimension = a.dim();
    fp.dim_center = a.center_basis().dim();
    GroupAlgebra::Filtration local;
    if (!filtration) {
        local = a.ideal_filtration();
        filtration = &local;
    }
    const auto q = filtration->quotient_dims();
    fp.jennings_dims.assign(q.begin() + 1, q.end());  // k >= 1
    fp.nilpotency_index = filtration->nilpotency_index;
    fp.frattini_quotient_order = a.group().order() / pc::frattini(a.group()).order();
    return fp;
}

json Fingerprint::to_json() const {
    return json{{"dimension", dimension},
                {"dim_center", dim_center},
                {"jennings_dims", jennings_dims},
                {"nilpotency_index", nilpotency_index},
                {"frattini_quotient_order", frattini_quotient_order}};
}

IsoSearch brute_force_iso_search(const pc::Group& P, const pc::Group& Q, int n, int m) {
    if (P.order() != Q.order())
        throw std::invalid_argument("iso search: the groups have different orders");
    if (P.order() > 1024)
        throw std::invalid_argument("iso search: capped at order 2^10");
    const std::uint32_t N = static_cast<std::uint32_t>(Q.order());
    std::vector<std::uint64_t> ord(N);
    for (std::uint32_t u = 0; u < N; ++u) ord[u] = Q.element_order(u);

    const std::uint64_t ex = std::uint64_t{1} << n;
    const std::uint64_t ey = std::uint64_t{1} << m;

    IsoSearch res;
    for (std::uint32_t u = 0; u < N; ++u) {
        if (ord[u] > ex) continue;
        for (std::uint32_t v = 0; v < N; ++v) {
            if (ord[v] > ey) continue;
            ++res.pairs_scanned;
            const std::uint32_t w = Q.commutator(v, u);
            if (Q.power(w, 4) != 0) continue;
            const std::uint32_t winv = Q.inverse(w);
            if (Q.conjugate(w, u) != winv) continue;
            if (Q.conjugate(w, v) != winv) continue;
            ++res.relation_survivors;
            const std::uint32_t gens[2] = {u, v};
            if (pc::subgroup_closure(Q, gens).order() == Q.order()) {
                res.found = true;
                res.image_x = u;
                res.image_y = v;
                return res;
            }
        }
    }
    return res;
}

VerificationResult run_verification(int n, int m, const Options& opt) {
    VerificationResult result;
    Report& rep = result.report;
    rep.n = n;
    rep.m = m;
    rep.seed = opt.seed;

    const pc::PcPresentation presG = pc::build_G(n, m);  // throws on bad (n, m)
    const pc::PcPresentation presH = pc::build_H(n, m);
    const std::uint64_t expected_order = std::uint64_t{1} << (n + m + 2);

    auto deps_ok = [&rep](std::initializer_list<const char*> deps) {
        for (const char* d : deps) {
            const ProofStep* s = rep.find(d);
            if (!s || !s->ok()) return false;
        }
        return true;
    };
    auto push_skipped = [&rep](const char* name, const char* stmt) {
        rep.steps.push_back(make_step(name, stmt));
    };

    std::shared_ptr<const pc::Group> G, H;
    // consistency of both presentations, plus the order confirmation
    for (const auto* side : {&presG, &presH}) {
        const bool isG = side == &presG;
        Timer tm;
        ProofStep s = make_step(isG ? "consistency-G" : "consistency-H",
                                "the presentation is consistent and presents a group of "
                                "order 2^(n+m+2)");
        const pc::ConsistencyReport cons = pc::consistency_check(*side);
        bool ok = cons.ok && side->group_order() == expected_order;
        std::uint64_t closure_order = 0;
        if (ok) {
            auto grp = std::make_shared<pc::Group>(*side);
            // the first two generators already generate: the third is their commutator
            const std::uint32_t gens2[2] = {grp->generator(0), grp->generator(1)};
            closure_order = pc::subgroup_closure(*grp, gens2).order();
            ok = closure_order == expected_order;
            (isG ? G : H) = std::move(grp);
        }
        s.witness = {{"consistent", cons.ok},
                     {"failures", cons.failures},
                     {"order", side->group_order()},
                     {"two_generator_closure", closure_order}};
        finish(s, ok, tm);
        rep.steps.push_back(std::move(s));
    }

    // subgroup structure facts used by the exponent argument
    if (deps_ok({"consistency-G", "consistency-H"})) {
        Timer tm;
        ProofStep s = make_step("subgroup-structure",
                                "G' = <z> and H' = <c> are cyclic of order 4; x^2 in Z(G), "
                                "a^2 in Z(H), xy in C_G(G'), b in C_H(H'); the centralizers "
                                "are <z, x^2, xy> and <c, a^2, b> and are abelian");
        const pc::Subgroup dG = pc::derived_subgroup(*G);
        const pc::Subgroup dH = pc::derived_subgroup(*H);
        const std::uint32_t x = G->generator(0), y = G->generator(1), z = G->generator(2);
        const std::uint32_t a = H->generator(0), b = H->generator(1), c = H->generator(2);
        const std::uint32_t zs[1] = {z};
        const std::uint32_t cs[1] = {c};
        const bool derived_ok = dG.elements == pc::subgroup_closure(*G, zs).elements &&
                                dH.elements == pc::subgroup_closure(*H, cs).elements &&
                                dG.order() == 4 && dH.order() == 4 &&
                                pc::is_cyclic(*G, dG) && pc::is_cyclic(*H, dH);
        const pc::Subgroup zG = pc::center(*G);
        const pc::Subgroup zH = pc::center(*H);
        const bool central_ok = zG.contains(G->mul(x, x)) && zH.contains(H->mul(a, a));
        const pc::Subgroup cG = pc::centralizer(*G, dG);
        const pc::Subgroup cH = pc::centralizer(*H, dH);
        const std::uint32_t xy = G->mul(x, y);
        const bool member_ok = cG.contains(xy) && cH.contains(b);
        const std::uint32_t gensG[3] = {z, G->mul(x, x), xy};
        const std::uint32_t gensH[3] = {c, H->mul(a, a), b};
        const bool generated_ok =
            pc::subgroup_closure(*G, gensG).elements == cG.elements &&
            pc::subgroup_closure(*H, gensH).elements == cH.elements;
        const bool abelian_ok = pc::is_abelian(*G, cG) && pc::is_abelian(*H, cH);
        s.witness = {{"derived_cyclic_order4", derived_ok},
                     {"squares_central", central_ok},
                     {"membership", member_ok},
                     {"centralizers_generated_as_stated", generated_ok},
                     {"centralizers_abelian", abelian_ok},
                     {"centralizer_orders", {cG.order(), cH.order()}}};
        finish(s, derived_ok && central_ok && member_ok && generated_ok && abelian_ok, tm);
        rep.steps.push_back(std::move(s));
    } else {
        push_skipped("subgroup-structure", "skipped: presentation inconsistent");
    }

    if (deps_ok({"consistency-G", "consistency-H"})) {
        rep.steps.push_back(verify_nonisomorphism(*G, *H, n, m));
    } else {
        push_skipped("non-isomorphism", "skipped: presentation inconsistent");
    }

    std::shared_ptr<GroupAlgebra> kH, kG;
    GroupAlgebra::Filtration filtH;
    bool algebra_ready = false;
    if (deps_ok({"consistency-H"})) {
        kH = std::make_shared<GroupAlgebra>(H);
        Timer tm;
        ProofStep s = make_step("jennings-dimension-basis",
                                "dim I/I^2 = 2 with A + I^2, B + I^2 a basis; D_2 = G n "
                                "(1 + I^2) equals the Frattini subgroup, of index 4");
        filtH = kH->ideal_filtration(opt.filtration);
        const gf2::Subspace& I = filtH.layers[1];
        const gf2::Subspace& I2 = filtH.layers[2];
        const bool dim_ok = I.dim() - I2.dim() == 2;
        gf2::Subspace span = I2;
        const bool basis_ok = span.insert(kH->embed_plus_one(H->generator(0))) &&
                              span.insert(kH->embed_plus_one(H->generator(1))) &&
                              span.dim() == I.dim();
        const auto dsubs = kH->dimension_subgroups(filtH);
        const pc::Subgroup frat = pc::frattini(*H);
        const bool d2_ok = dsubs.size() >= 2 && dsubs[1].elements == frat.elements;
        const bool index_ok = d2_ok && H->order() / dsubs[1].order() == 4;
        s.witness = {{"dim_I_mod_I2", I.dim() - I2.dim()},
                     {"AB_basis_mod_I2", basis_ok},
                     {"D2_equals_frattini", d2_ok},
                     {"frattini_quotient_order", d2_ok ? H->order() / dsubs[1].order() : 0},
                     {"layer_dims_head",
                      {filtH.layers[0].dim(), I.dim(), I2.dim()}}};
        finish(s, dim_ok && basis_ok && d2_ok && index_ok, tm);
        rep.steps.push_back(std::move(s));
        algebra_ready = rep.steps.back().ok();
    } else {
        push_skipped("jennings-dimension-basis", "skipped: kH not available");
    }

    TildeGens tilde;
    const char* alg_step_names[] = {"identity-c-in-I2",      "identity-y-congruent-b",
                                    "burnside-ring-generation", "relation-x-power",
                                    "relation-x2-central",   "relation-zx-inverse",
                                    "identity-y-squared-expansion", "relation-y2-central",
                                    "relation-zy-inverse",   "identity-y-power-expansion",
                                    "relation-y-power",      "relation-z-fourth"};
    if (algebra_ready) {
        tilde = build_tilde_generators(*kH);
        const gf2::Subspace& I = filtH.layers[1];
        const gf2::Subspace& I2 = filtH.layers[2];
        // congruences and Burnside first, then the relations, with the two
        // power expansions in the positions where the relations need them
        rep.steps.push_back(steps::identity_c_in_i2(*kH, I2));
        rep.steps.push_back(steps::identity_y_congruent_b(*kH, tilde, I2));
        rep.steps.push_back(steps::burnside_generation(*kH, tilde, I, I2));
        rep.steps.push_back(steps::relation_x_power(*kH, tilde, n));
        rep.steps.push_back(steps::relation_x2_central(*kH, tilde));
        rep.steps.push_back(steps::relation_zx_inverse(*kH, tilde));
        rep.steps.push_back(steps::identity_y_squared(*kH, tilde));
        rep.steps.push_back(steps::relation_y2_central(*kH, tilde));
        rep.steps.push_back(steps::relation_zy_inverse(*kH, tilde));
        rep.steps.push_back(steps::identity_y_power(*kH, tilde, m));
        rep.steps.push_back(steps::relation_y_power(*kH, tilde, m));
        rep.steps.push_back(steps::relation_z_fourth(*kH, tilde));
    } else {
        for (const char* name : alg_step_names)
            push_skipped(name, "skipped: kH not available");
    }

    const char* relation_names[] = {"relation-x-power",  "relation-x2-central",
                                    "relation-zx-inverse", "relation-y2-central",
                                    "relation-zy-inverse", "relation-y-power",
                                    "relation-z-fourth"};
    bool relations_ok = algebra_ready;
    for (const char* name : relation_names)
        relations_ok = relations_ok && deps_ok({name});

    std::optional<GroupBasis> basis;
    if (relations_ok && deps_ok({"consistency-G"})) {
        ProofStep s;
        basis = close_group_basis(*kH, *G, tilde, s);
        rep.steps.push_back(std::move(s));
    } else {
        push_skipped("group-basis-closure", "skipped: a relation step failed");
    }

    if (basis) {
        Timer tm;
        ProofStep s = make_step("certificate-multiplicative",
                                "the change-of-basis matrix is invertible, fixes 1 and is "
                                "multiplicative on basis pairs");
        kG = std::make_shared<GroupAlgebra>(G);
        Instance inst;
        inst.n = n;
        inst.m = m;
        inst.G = G;
        inst.H = H;
        inst.kG = kG;
        inst.kH = kH;
        Certificate cert = build_certificate(inst, *basis);
        const std::size_t r = gf2::rank(cert.phi);
        const bool unit_row = cert.phi.row[0] == BitVector::unit(cert.phi.cols, 0);
        const MultCheck mc = check_multiplicative(cert, *G, *kH, opt.mult_policy, opt.seed,
                                                  opt.sample_pairs);
        rep.mult_policy = mc.mode;
        s.witness = {{"rank", r},
                     {"phi_fixes_one", unit_row},
                     {"mode", mc.mode},
                     {"pairs_checked", mc.pairs_checked},
                     {"failure", mc.failure}};
        finish(s, r == cert.phi.rows && unit_row && mc.ok, tm);
        rep.steps.push_back(std::move(s));
        if (rep.steps.back().ok()) result.certificate = std::move(cert);
    } else {
        push_skipped("certificate-multiplicative", "skipped: no group basis");
    }

    if (deps_ok({"consistency-G", "consistency-H"})) {
        Timer tm;
        ProofStep s = make_step("fingerprint-agreement",
                                "the invariant fingerprints of kG and kH agree, and each "
                                "center dimension equals the conjugacy class count");
        if (!kG) kG = std::make_shared<GroupAlgebra>(G);
        if (!kH) kH = std::make_shared<GroupAlgebra>(H);
        const auto filtG = kG->ideal_filtration(opt.filtration);
        const Fingerprint fpG = algebra_invariant_fingerprint(*kG, &filtG);
        const Fingerprint fpH =
            algebra_invariant_fingerprint(*kH, algebra_ready ? &filtH : nullptr);
        const std::size_t classesG = pc::conjugacy_classes(*G).size();
        const std::size_t classesH = pc::conjugacy_classes(*H).size();
        const bool class_ok = fpG.dim_center == classesG && fpH.dim_center == classesH;
        const bool center_kernel_ok = kG->center_kernel() == kG->center_basis() &&
                                      kH->center_kernel() == kH->center_basis();
        s.witness = {{"kG", fpG.to_json()},
                     {"kH", fpH.to_json()},
                     {"conjugacy_classes", {classesG, classesH}},
                     {"center_matches_class_count", class_ok},
                     {"center_kernel_equals_class_sums", center_kernel_ok}};
        finish(s, fpG == fpH && class_ok && center_kernel_ok, tm);
        rep.steps.push_back(std::move(s));
    } else {
        push_skipped("fingerprint-agreement", "skipped: presentation inconsistent");
    }

    if (rep.mult_policy.empty()) rep.mult_policy = "none";
    return result;
}

}  // namespace mipcert::verify
