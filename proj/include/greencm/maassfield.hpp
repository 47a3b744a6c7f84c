#pragma once

#include "greencm/arith.hpp"
#include "greencm/discforms.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace greencm {

// holomorphic part coefficients c(m, mu) = -(1/r) log|alpha(m, mu)|, alpha in a number field
struct CoefficientTable {
    FieldPtr field;
    long r = 1;
    DiscGroupPtr group;                // N'/N from the stored Gram matrix
    std::vector<RatVector> generators;  // mu = sum k_i generators[i]
    std::map<std::pair<Rational, DiscVector>, NFElem> entries;  // mu folded under +-
    std::string provenance;

    std::optional<Rational> smallest_index() const;
    // folded key of a vector given by coordinates in the lattice basis
    DiscVector key(const RatVector& x) const;
    DiscVector key_from_generators(const std::vector<long>& k) const;
    // lexicographically smallest generator coordinates of a folded class
    std::vector<long> label(const DiscVector& key) const;
};

struct TableIncomplete : MathError {
    using MathError::MathError;
};

CoefficientTable load_table(const std::filesystem::path& path);
CoefficientTable parse_table(const std::string& json_text);

// 0 below the smallest stored index; TableIncomplete for gaps
BigReal maass_coefficient(const CoefficientTable& t, const Rational& m, const DiscVector& mu, unsigned bits);

// automorphism given by the image of the generator, together with the root the table is
// evaluated at afterwards; an identity image with a new box moves to a conjugate embedding
struct GaloisMove {
    std::vector<Rational> image;  // coordinates of sigma(x) in the power basis
    EmbeddingBox box;
};

GaloisMove identity_move(const CoefficientTable& t);
// the move pinning the table to each root of the minimal polynomial (index 0 is not special)
std::vector<GaloisMove> conjugate_moves(const CoefficientTable& t);

CoefficientTable galois_act(const CoefficientTable& t, const GaloisMove& sigma);

}  // namespace greencm
