#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "mipcert/galgebra.hpp"
#include "mipcert/gf2.hpp"
#include "mipcert/pcgroup.hpp"

namespace mipcert::verify {

using alg::BitVector;
using alg::GroupAlgebra;

/// One checked statement of the proof chain.
struct ProofStep {
    enum class Status { verified, failed, skipped };

    std::string name;
    std::string statement;
    Status status = Status::skipped;
    nlohmann::json witness;  // elements, dimensions, residues
    double millis = 0.0;

    bool ok() const { return status == Status::verified; }
};

std::string to_string(ProofStep::Status s);

struct Options {
    enum class MultPolicy { automatic, exhaustive, sampled };

    std::uint64_t seed = 1;
    MultPolicy mult_policy = MultPolicy::automatic;
    std::size_t sample_pairs = 10000;
    GroupAlgebra::FiltrationStrategy filtration =
        GroupAlgebra::FiltrationStrategy::generator_translates;
};

/// Structured outcome of a verification run; serializes to the
/// "mip-report/1" JSON shape.
struct Report {
    int n = 0;
    int m = 0;
    std::uint64_t seed = 0;
    std::string mult_policy;
    std::vector<ProofStep> steps;

    bool all_verified() const;
    const ProofStep* find(std::string_view name) const;
    nlohmann::json to_json() const;
    std::string to_text() const;
};

/// Both groups of an instance plus their algebras over the 2-element field.
struct Instance {
    int n = 0;
    int m = 0;
    std::shared_ptr<const pc::Group> G;
    std::shared_ptr<const pc::Group> H;
    std::shared_ptr<const GroupAlgebra> kG;
    std::shared_ptr<const GroupAlgebra> kH;
};

/// Builds G(n,m), H(n,m) and their group algebras.  Throws on parameter
/// domain violations; presentations are consistency-checked by the caller
/// (run_verification does so as its first steps).
Instance build_instance(int n, int m);

/// The exponent argument: C_G(G') and C_H(H') are abelian with exponents
/// 2^n and 2^(n-1), hence the groups are not isomorphic.
ProofStep verify_nonisomorphism(const pc::Group& G, const pc::Group& H, int n, int m);

/// Candidate generators of the group basis inside kH:
/// x~ = a,  y~ = b(a+b+ab)c,  z~ = [y~, x~] in the unit group.
struct TildeGens {
    BitVector x, y, z;
};

TildeGens build_tilde_generators(const GroupAlgebra& kH);

/// The seven relation checks for x~, y~, z~ against the presentation of G:
/// x~^(2^n) = 1; x~^2 central; z~^x~ = z~^-1 (direct and via [y~, x~^2]);
/// y~^2 central; z~^y~ = z~^-1; y~^(2^m) = 1; z~^4 = 1 via the ideal J
/// generated by C (1+z~ in J, J^4 = 0).
std::vector<ProofStep> verify_relations(const GroupAlgebra& kH, const TildeGens& t,
                                        int n, int m);

/// The computational identities feeding the relation checks:
/// (a) C = b^-1 a^-1 (BA + AB) and C in I^2;
/// (b) y~ = b mod I^2;
/// (c) y~^2 equals its expansion by central parts;
/// (d) y~^(2^m) equals its closed-form expansion, which collapses to 1;
/// (e) {A + I^2, Y + I^2} spans I/I^2 and A, Y generate I as a ring.
std::vector<ProofStep> verify_identities(const GroupAlgebra& kH, const TildeGens& t,
                                         const gf2::Subspace& aug_ideal,
                                         const gf2::Subspace& i2, int m);

/// The group basis G~ = <x~, y~> closed inside the unit group, with each
/// member labeled by the normal form of its preimage in G.  by_g_index[i] is
/// the member labeled by the G element of index i.
struct GroupBasis {
    std::vector<BitVector> by_g_index;
};

/// Breadth-first closure with a |H|+1 cap.  Fails the returned step when the
/// closure size differs from |G|, the labeling is not multiplicative on some
/// edge, or the members do not span kH.
std::optional<GroupBasis> close_group_basis(const GroupAlgebra& kH, const pc::Group& G,
                                            const TildeGens& t, ProofStep& step);

/// Change-of-basis certificate: row i is the kH coordinate vector of the
/// image of the kG basis element with index i.
struct Certificate {
    int n = 0;
    int m = 0;
    gf2::Matrix phi;
};

struct MultCheck {
    bool ok = true;
    std::string mode;  // "exhaustive" or "sampled"
    std::uint64_t pairs_checked = 0;
    std::string failure;
};

/// Multiplicativity of the row map: phi(g) phi(h) = phi(gh).  Exhaustive mode
/// checks every basis pair via per-column translation tables; sampled mode
/// checks all (g, generator) pairs plus seeded random pairs by direct
/// convolution.
MultCheck check_multiplicative(const Certificate& cert, const pc::Group& G,
                               const GroupAlgebra& kH, Options::MultPolicy policy,
                               std::uint64_t seed, std::size_t sample_pairs);

Certificate build_certificate(const Instance& inst, const GroupBasis& basis);

/// File form: "mipcert v1 n=<n> m=<m> order=<o>", the gf2 matrix block, and a
/// trailing "checksum fnv1a64 <hex>" line over everything above it.
std::string encode_certificate(const Certificate& cert);
Certificate decode_certificate(std::string_view text);  // validates checksum

struct CertCheck {
    bool ok = true;
    std::vector<std::string> failures;
    MultCheck mult;
    int n = 0, m = 0;
};

/// Independent re-check of a certificate file: rebuilds both algebras from
/// (n, m) and re-verifies dimensions, invertibility, unit rows, phi(1) = 1
/// and multiplicativity under the given policy.
CertCheck verify_certificate(std::string_view file_text, const Options& opt);

/// Necessary conditions for an algebra isomorphism, comparable across kG/kH.
struct Fingerprint {
    std::size_t dimension = 0;
    std::size_t dim_center = 0;
    std::vector<std::size_t> jennings_dims;  // dim I^k/I^(k+1), k >= 1
    std::size_t nilpotency_index = 0;
    std::uint64_t frattini_quotient_order = 0;

    bool operator==(const Fingerprint&) const = default;
    nlohmann::json to_json() const;
};

Fingerprint algebra_invariant_fingerprint(const GroupAlgebra& a,
                                          const GroupAlgebra::Filtration* filtration = nullptr);

/// Exhaustive search for an isomorphism P -> Q determined by images of the
/// two defining generators, filtered by element orders and the defining
/// relations, then by closure.  Requires |P| = |Q| <= 2^10.
struct IsoSearch {
    bool found = false;
    std::uint32_t image_x = 0;
    std::uint32_t image_y = 0;
    std::uint64_t pairs_scanned = 0;
    std::uint64_t relation_survivors = 0;
};

IsoSearch brute_force_iso_search(const pc::Group& P, const pc::Group& Q, int n, int m);

struct VerificationResult {
    Report report;
    std::optional<Certificate> certificate;
};

/// Runs the whole proof chain in order: consistency of both presentations,
/// the exponent argument, the Jennings/ideal identities, the seven relation
/// checks, group-basis closure, the certificate and the invariant
/// fingerprints.  A failed step marks its dependents skipped.
VerificationResult run_verification(int n, int m, const Options& opt = {});

std::uint64_t fnv1a64(std::string_view data);

}  // namespace mipcert::verify
