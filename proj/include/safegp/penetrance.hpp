#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "safegp/rng.hpp"

namespace safegp {

// n-locus biallelic disease model: per-locus minor allele frequencies plus a
// 3^n penetrance table. Genotype codes: 0 = major homozygote,
// 1 = heterozygote, 2 = minor homozygote. The table is flattened with locus 0
// slowest and the last locus fastest.
struct PenetranceModel {
    int n_loci = 0;
    std::vector<double> maf;
    std::vector<double> table;

    int cells() const {
        int c = 1;
        for (int i = 0; i < n_loci; ++i) c *= 3;
        return c;
    }
    int flat_index(std::span<const int> genotypes) const;
};

// Hardy-Weinberg genotype proportions ((1-q)^2, 2q(1-q), q^2) for q = maf.
std::array<double, 3> hw_genotype_freqs(double maf);

// Joint genotype frequencies across loci (independent loci); sums to 1.
std::vector<double> joint_genotype_freqs(const PenetranceModel& model);

// Population prevalence K: frequency-weighted mean penetrance.
double prevalence(const PenetranceModel& model);

// Observed-scale heritability: sum freq*(pen-K)^2 / (K*(1-K)).
// Throws std::domain_error when K is 0 or 1.
double heritability(const PenetranceModel& model);

// Conditional mean penetrance given fixed genotypes at a proper non-empty
// subset of loci, weighting the remaining loci by their HW frequencies.
double marginal_penetrance(const PenetranceModel& model, std::span<const int> subset_loci,
                           std::span<const int> fixed_genotypes);

// True iff every marginal penetrance over every proper non-empty locus subset
// equals the prevalence within tol: no main effects, no nested effects.
bool is_pure_strict(const PenetranceModel& model, double tol);

// Worst marginal deviation |marginal - K| over all proper subsets/fixings.
double max_marginal_deviation(const PenetranceModel& model);

// The heritability-1 parity model: MAF 0.5 at every locus, penetrance 1 when
// the number of heterozygous loci is odd. K = 0.5 and every proper marginal
// equals 0.5 exactly.
PenetranceModel xor_model(int n_loci);

struct ModelSearchParams {
    int n_loci = 2;
    double maf = 0.2;
    double target_h2 = 0.1;
    double h2_tol = 0.01;
    long max_iters = 200000;
};

// Randomly generates a pure-strict model meeting the heritability target,
// with prevalence left free to vary. Repeated random initialization plus
// penalty-driven hill climbing proposes candidate tables; each candidate is
// then projected exactly onto the pure-strict constraint subspace and scaled
// about its prevalence to hit the heritability target. Throws
// std::runtime_error when max_iters proposals are exhausted.
PenetranceModel random_model_search(const ModelSearchParams& params, Rng& rng);

// JSON persistence; read validates sizes and ranges.
void write_model(const PenetranceModel& model, const std::string& path);
PenetranceModel read_model(const std::string& path);

}  // namespace safegp
