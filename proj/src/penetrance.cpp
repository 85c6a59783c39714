#include "safegp/penetrance.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "json.hpp"

namespace safegp {

namespace {

void check_model(const PenetranceModel& m) {
    if (m.n_loci < 1) throw std::invalid_argument("model: n_loci must be >= 1");
    if (static_cast<int>(m.maf.size()) != m.n_loci)
        throw std::invalid_argument("model: maf list length != n_loci");
    for (double q : m.maf)
        if (!(q > 0.0 && q <= 0.5)) throw std::invalid_argument("model: maf outside (0, 0.5]");
    if (static_cast<int>(m.table.size()) != m.cells())
        throw std::invalid_argument("model: table length != 3^n_loci");
    for (double p : m.table)
        if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("model: penetrance outside [0,1]");
}

}  // namespace

int PenetranceModel::flat_index(std::span<const int> genotypes) const {
    int idx = 0;
    for (int l = 0; l < n_loci; ++l) idx = idx * 3 + genotypes[l];
    return idx;
}

std::array<double, 3> hw_genotype_freqs(double maf) {
    if (!(maf > 0.0 && maf <= 0.5))
        throw std::domain_error("hw_genotype_freqs: maf must be in (0, 0.5]");
    const double q = maf, p = 1.0 - maf;
    return {p * p, 2.0 * p * q, q * q};
}

std::vector<double> joint_genotype_freqs(const PenetranceModel& model) {
    check_model(model);
    std::vector<std::array<double, 3>> per_locus(model.n_loci);
    for (int l = 0; l < model.n_loci; ++l) per_locus[l] = hw_genotype_freqs(model.maf[l]);

    const int cells = model.cells();
    std::vector<double> joint(cells, 1.0);
    for (int idx = 0; idx < cells; ++idx) {
        int rest = idx;
        for (int l = model.n_loci - 1; l >= 0; --l) {
            joint[idx] *= per_locus[l][rest % 3];
            rest /= 3;
        }
    }
    return joint;
}

double prevalence(const PenetranceModel& model) {
    const auto joint = joint_genotype_freqs(model);
    double k = 0.0;
    for (size_t i = 0; i < joint.size(); ++i) k += joint[i] * model.table[i];
    return k;
}

double heritability(const PenetranceModel& model) {
    const auto joint = joint_genotype_freqs(model);
    double k = 0.0;
    for (size_t i = 0; i < joint.size(); ++i) k += joint[i] * model.table[i];
    if (k <= 0.0 || k >= 1.0)
        throw std::domain_error("heritability: degenerate model (prevalence 0 or 1)");
    double var = 0.0;
    for (size_t i = 0; i < joint.size(); ++i) {
        const double d = model.table[i] - k;
        var += joint[i] * d * d;
    }
    return var / (k * (1.0 - k));
}

double marginal_penetrance(const PenetranceModel& model, std::span<const int> subset_loci,
                           std::span<const int> fixed_genotypes) {
    check_model(model);
    if (subset_loci.empty() || static_cast<int>(subset_loci.size()) >= model.n_loci)
        throw std::domain_error("marginal_penetrance: subset must be proper and non-empty");
    if (subset_loci.size() != fixed_genotypes.size())
        throw std::domain_error("marginal_penetrance: subset/genotype length mismatch");
    std::vector<int> fixed(model.n_loci, -1);
    for (size_t i = 0; i < subset_loci.size(); ++i) {
        const int l = subset_loci[i];
        if (l < 0 || l >= model.n_loci || fixed[l] != -1)
            throw std::domain_error("marginal_penetrance: invalid locus subset");
        const int g = fixed_genotypes[i];
        if (g < 0 || g > 2) throw std::domain_error("marginal_penetrance: genotype outside 0..2");
        fixed[l] = g;
    }

    std::vector<std::array<double, 3>> per_locus(model.n_loci);
    for (int l = 0; l < model.n_loci; ++l) per_locus[l] = hw_genotype_freqs(model.maf[l]);

    const int cells = model.cells();
    double num = 0.0, den = 0.0;
    for (int idx = 0; idx < cells; ++idx) {
        int rest = idx;
        double w = 1.0;
        bool match = true;
        for (int l = model.n_loci - 1; l >= 0; --l) {
            const int g = rest % 3;
            rest /= 3;
            if (fixed[l] == -1)
                w *= per_locus[l][g];
            else if (fixed[l] != g)
                match = false;
        }
        if (!match) continue;
        num += w * model.table[idx];
        den += w;
    }
    return num / den;
}

namespace {

// Visits every proper non-empty locus subset with every genotype fixing.
template <typename Fn>
void for_each_marginal(int n_loci, Fn&& fn) {
    const int full = (1 << n_loci) - 1;
    std::vector<int> loci, genos;
    for (int mask = 1; mask < full; ++mask) {
        loci.clear();
        for (int l = 0; l < n_loci; ++l)
            if (mask & (1 << l)) loci.push_back(l);
        const int k = static_cast<int>(loci.size());
        int combos = 1;
        for (int i = 0; i < k; ++i) combos *= 3;
        for (int c = 0; c < combos; ++c) {
            genos.assign(k, 0);
            int rest = c;
            for (int i = k - 1; i >= 0; --i) {
                genos[i] = rest % 3;
                rest /= 3;
            }
            fn(std::span<const int>(loci), std::span<const int>(genos));
        }
    }
}

}  // namespace

double max_marginal_deviation(const PenetranceModel& model) {
    const double k = prevalence(model);
    double worst = 0.0;
    for_each_marginal(model.n_loci, [&](std::span<const int> loci, std::span<const int> genos) {
        worst = std::max(worst, std::fabs(marginal_penetrance(model, loci, genos) - k));
    });
    return worst;
}

bool is_pure_strict(const PenetranceModel& model, double tol) {
    return max_marginal_deviation(model) <= tol;
}

PenetranceModel xor_model(int n_loci) {
    if (n_loci != 2 && n_loci != 3) throw std::invalid_argument("xor_model: n_loci must be 2 or 3");
    PenetranceModel m;
    m.n_loci = n_loci;
    m.maf.assign(n_loci, 0.5);
    m.table.assign(m.cells(), 0.0);
    for (int idx = 0; idx < m.cells(); ++idx) {
        int rest = idx, hets = 0;
        for (int l = 0; l < n_loci; ++l) {
            if (rest % 3 == 1) ++hets;
            rest /= 3;
        }
        m.table[idx] = (hets % 2 == 1) ? 1.0 : 0.0;
    }
    return m;
}

namespace {

// One row per marginal constraint: coefficients of marginal(S, g) - K as a
// linear functional of the penetrance table. Rows are precomputed once per
// (n_loci, maf) and reused across the search.
struct ConstraintRows {
    std::vector<std::vector<double>> rows;
    std::vector<double> row_norm2;

    ConstraintRows(int n_loci, const std::vector<double>& maf) {
        PenetranceModel probe{n_loci, maf, std::vector<double>(1, 0.0)};
        probe.table.assign(probe.cells(), 0.0);
        const auto joint = joint_genotype_freqs(probe);
        const int cells = probe.cells();

        std::vector<std::array<double, 3>> per_locus(n_loci);
        for (int l = 0; l < n_loci; ++l) per_locus[l] = hw_genotype_freqs(maf[l]);

        for_each_marginal(n_loci, [&](std::span<const int> loci, std::span<const int> genos) {
            std::vector<int> fixed(n_loci, -1);
            for (size_t i = 0; i < loci.size(); ++i) fixed[loci[i]] = genos[i];
            std::vector<double> row(cells, 0.0);
            for (int idx = 0; idx < cells; ++idx) {
                int rest = idx;
                double w = 1.0;
                bool match = true;
                for (int l = n_loci - 1; l >= 0; --l) {
                    const int g = rest % 3;
                    rest /= 3;
                    if (fixed[l] == -1)
                        w *= per_locus[l][g];
                    else if (fixed[l] != g)
                        match = false;
                }
                row[idx] = (match ? w : 0.0) - joint[idx];
            }
            double n2 = 0.0;
            for (double v : row) n2 += v * v;
            rows.push_back(std::move(row));
            row_norm2.push_back(n2);
        });
    }

    double residual(int r, std::span<const double> table) const {
        double s = 0.0;
        for (size_t i = 0; i < rows[r].size(); ++i) s += rows[r][i] * table[i];
        return s;
    }

    double max_abs_residual(std::span<const double> table) const {
        double worst = 0.0;
        for (size_t r = 0; r < rows.size(); ++r)
            worst = std::max(worst, std::fabs(residual(static_cast<int>(r), table)));
        return worst;
    }

    // Kaczmarz sweeps drive every marginal residual to round-off; the box
    // clip keeps the table feasible while the projections settle.
    bool project(std::vector<double>& table, int max_sweeps, double tol) const {
        for (int sweep = 0; sweep < max_sweeps; ++sweep) {
            for (size_t r = 0; r < rows.size(); ++r) {
                if (row_norm2[r] <= 0.0) continue;
                const double res = residual(static_cast<int>(r), table);
                const double step = res / row_norm2[r];
                for (size_t i = 0; i < table.size(); ++i) table[i] -= step * rows[r][i];
            }
            for (double& v : table) v = std::clamp(v, 0.0, 1.0);
            if (max_abs_residual(table) <= tol) return true;
        }
        return false;
    }
};

double penalty_of(const ConstraintRows& rows, const std::vector<double>& joint,
                  std::span<const double> table, double target_h2) {
    double p = 0.0;
    for (size_t r = 0; r < rows.rows.size(); ++r) {
        const double res = rows.residual(static_cast<int>(r), table);
        p += res * res;
    }
    double k = 0.0;
    for (size_t i = 0; i < table.size(); ++i) k += joint[i] * table[i];
    double h2 = 0.0;
    if (k > 0.0 && k < 1.0) {
        double var = 0.0;
        for (size_t i = 0; i < table.size(); ++i) {
            const double d = table[i] - k;
            var += joint[i] * d * d;
        }
        h2 = var / (k * (1.0 - k));
    }
    const double gap = h2 - target_h2;
    return p + gap * gap;
}

}  // namespace

PenetranceModel random_model_search(const ModelSearchParams& params, Rng& rng) {
    if (params.n_loci < 2 || params.n_loci > 3)
        throw std::invalid_argument("random_model_search: n_loci must be 2 or 3");
    if (params.target_h2 < 0.0 || params.target_h2 >= 1.0)
        throw std::invalid_argument("random_model_search: target_h2 must be in [0, 1)");

    PenetranceModel model;
    model.n_loci = params.n_loci;
    model.maf.assign(params.n_loci, params.maf);

    // A flat table is pure-strict with h2 = 0.
    if (params.target_h2 == 0.0) {
        model.table.assign(model.cells(), rng.uniform(0.05, 0.95));
        return model;
    }

    const ConstraintRows rows(params.n_loci, model.maf);
    model.table.assign(model.cells(), 0.0);
    const auto joint = joint_genotype_freqs(model);
    const int cells = model.cells();

    constexpr double kStepSigma = 0.05;
    constexpr int kHillIters = 1500;
    constexpr int kProjectSweeps = 400;
    constexpr double kProjectTol = 1e-11;

    long spent = 0;
    while (spent < params.max_iters) {
        // Random restart.
        std::vector<double> table(cells);
        for (double& v : table) v = rng.real();
        ++spent;

        // Coarse hill climb on the combined penalty pulls the random table
        // toward the feasible region and toward the heritability target.
        double pen = penalty_of(rows, joint, table, params.target_h2);
        for (int it = 0; it < kHillIters && spent < params.max_iters; ++it, ++spent) {
            const int j = static_cast<int>(rng.index(cells));
            const double old = table[j];
            table[j] = std::clamp(old + rng.normal(0.0, kStepSigma), 0.0, 1.0);
            const double cand = penalty_of(rows, joint, table, params.target_h2);
            if (cand <= pen)
                pen = cand;
            else
                table[j] = old;
        }

        // Exact finishing: project onto the pure-strict subspace, then scale
        // the table about K. Scaling preserves K and every marginal while
        // moving h2 to exactly t^2 times its current value.
        if (!rows.project(table, kProjectSweeps, kProjectTol)) continue;
        double k = 0.0;
        for (int i = 0; i < cells; ++i) k += joint[i] * table[i];
        if (k <= 1e-6 || k >= 1.0 - 1e-6) continue;
        double var = 0.0;
        for (int i = 0; i < cells; ++i) {
            const double d = table[i] - k;
            var += joint[i] * d * d;
        }
        const double h2 = var / (k * (1.0 - k));
        if (h2 <= 1e-12) continue;
        const double t = std::sqrt(params.target_h2 / h2);
        bool in_box = true;
        for (int i = 0; i < cells; ++i) {
            table[i] = k + t * (table[i] - k);
            if (table[i] < 0.0 || table[i] > 1.0) in_box = false;
        }
        if (!in_box) continue;

        model.table = table;
        if (is_pure_strict(model, 1e-6) &&
            std::fabs(heritability(model) - params.target_h2) <= params.h2_tol)
            return model;
    }
    throw std::runtime_error("random_model_search: no model found within max_iters; reseed or raise the budget");
}

void write_model(const PenetranceModel& model, const std::string& path) {
    check_model(model);
    nlohmann::json j;
    j["n_loci"] = model.n_loci;
    j["maf"] = model.maf;
    j["table"] = model.table;
    j["prevalence"] = prevalence(model);
    j["heritability"] = heritability(model);
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_model: cannot open " + path);
    out << j.dump(2) << '\n';
}

PenetranceModel read_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("read_model: cannot open " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::parse_error& e) {
        throw std::runtime_error("read_model: " + path + ": " + e.what());
    }
    PenetranceModel model;
    try {
        model.n_loci = j.at("n_loci").get<int>();
        model.maf = j.at("maf").get<std::vector<double>>();
        model.table = j.at("table").get<std::vector<double>>();
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error("read_model: " + path + ": " + e.what());
    }
    check_model(model);
    return model;
}

}  // namespace safegp
