#pragma once

#include "vessiot/jets.hpp"
#include "vessiot/linalg.hpp"
#include "vessiot/report.hpp"

#include <string>
#include <vector>

namespace vessiot {

struct GeneratorSet {
    std::vector<VectorField> fields;
    std::vector<std::string> labels;
    int order = 0;
    bool prolong = false;   // fields are point fields to be lifted to `order`
    std::vector<int> deps;  // dependents to lift (empty = all)

    std::vector<VectorField> at_order(const Context& ctx, int q) const;
    std::vector<VectorField> effective(const Context& ctx) const { return at_order(ctx, order); }
    std::string label(std::size_t i) const;
};

CheckReport is_invariant(const Context& ctx, const RationalExpr& phi, const GeneratorSet& g);
RankReport generic_rank(const Context& ctx, const std::vector<VectorField>& fields, std::uint64_t seed = 1);
// coordinates restricted to `coords` when nonempty
RankReport generic_rank(const Context& ctx, const std::vector<VectorField>& fields, const std::vector<Var>& coords,
                        std::uint64_t seed = 1);

struct InvariantCount {
    int fiber = 0;
    int rank = 0;
    int count = 0;
    bool exact = true;
};
InvariantCount invariant_count(const Context& ctx, const GeneratorSet& g, int q);

using StructureTable = std::vector<std::vector<std::vector<Scalar>>>;  // c[rho][sigma][tau]
struct StructureResult {
    bool closed = false;
    StructureTable c;
    std::string offending;  // pair label when not closed
};
StructureResult structure_constants(const Context& ctx, const GeneratorSet& g);
bool jacobi_condition(const StructureTable& c);

CheckReport commutant_check(const Context& ctx, const GeneratorSet& delta, const GeneratorSet& theta);

CheckReport constancy_check(const Context& ctx, const std::vector<RationalExpr>& targets,
                            const std::vector<std::pair<VectorField, VectorField>>& pairs, const Bindings& ident);

enum class Membership { Stable, Outside, Undecided };
std::string to_string(Membership m);
struct WitnessEntry {
    RationalExpr value;
    Membership membership;
};
std::vector<WitnessEntry> noninvariance_witness(const Context& ctx, const std::vector<RationalExpr>& gens,
                                                const VectorField& delta);

bool generically_free(const Context& ctx, const GeneratorSet& g, int q);

}  // namespace vessiot
