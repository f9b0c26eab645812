#include "psychocal/metrics.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>

namespace psychocal::metrics {
namespace {

double mean(const std::vector<double>& v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

// Average ranks, 1-based; tied values share the mean of their positions.
std::vector<double> average_ranks(const std::vector<double>& v) {
    const std::size_t n = v.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&v](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> ranks(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && v[order[j + 1]] == v[order[i]]) ++j;
        const double r = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = r;
        i = j + 1;
    }
    return ranks;
}

Eigen::VectorXd sample_mean(const std::vector<std::vector<double>>& set, Eigen::Index dim) {
    Eigen::VectorXd mu = Eigen::VectorXd::Zero(dim);
    for (const auto& v : set) mu += Eigen::Map<const Eigen::VectorXd>(v.data(), dim);
    return mu / static_cast<double>(set.size());
}

Eigen::MatrixXd sample_cov(const std::vector<std::vector<double>>& set,
                           const Eigen::VectorXd& mu) {
    const Eigen::Index dim = mu.size();
    Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(dim, dim);
    for (const auto& v : set) {
        const Eigen::VectorXd c = Eigen::Map<const Eigen::VectorXd>(v.data(), dim) - mu;
        cov += c * c.transpose();
    }
    return cov / static_cast<double>(set.size() - 1);
}

void check_set(const std::vector<std::vector<double>>& set, const char* which) {
    if (set.size() < 2)
        throw MetricError(std::string("fid/diversity_kl: set ") + which + " needs >= 2 vectors");
    for (const auto& v : set)
        if (v.size() != set.front().size())
            throw MetricError(std::string("inconsistent vector dimension in set ") + which);
}

}  // namespace

double pcc(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) throw MetricError("pcc: length mismatch");
    if (x.size() < 2) throw MetricError("pcc: need at least 2 points");
    const double mx = mean(x), my = mean(y);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx == 0.0 || syy == 0.0) throw MetricError("pcc: zero variance input");
    return sxy / std::sqrt(sxx * syy);
}

double scc(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) throw MetricError("scc: length mismatch");
    return pcc(average_ranks(x), average_ranks(y));
}

double rmse(const std::vector<double>& pred, const std::vector<double>& truth) {
    if (pred.size() != truth.size()) throw MetricError("rmse: length mismatch");
    if (pred.empty()) throw MetricError("rmse: empty input");
    double s = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) s += (pred[i] - truth[i]) * (pred[i] - truth[i]);
    return std::sqrt(s / static_cast<double>(pred.size()));
}

double qwk(const std::vector<int>& a, const std::vector<int>& b, int num_categories) {
    if (a.size() != b.size()) throw MetricError("qwk: length mismatch");
    if (a.empty()) throw MetricError("qwk: empty input");
    const int c = num_categories;
    if (c < 2) throw MetricError("qwk: need at least 2 categories");
    std::vector<double> observed(c * c, 0.0);
    std::vector<double> row(c, 0.0), col(c, 0.0);
    for (std::size_t k = 0; k < a.size(); ++k) {
        if (a[k] < 0 || a[k] >= c || b[k] < 0 || b[k] >= c)
            throw MetricError("qwk: score out of range");
        observed[a[k] * c + b[k]] += 1.0;
        row[a[k]] += 1.0;
        col[b[k]] += 1.0;
    }
    const double total = static_cast<double>(a.size());
    const double denom_scale = static_cast<double>((c - 1) * (c - 1));
    double num = 0.0, den = 0.0;
    for (int i = 0; i < c; ++i) {
        for (int j = 0; j < c; ++j) {
            const double w = static_cast<double>((i - j) * (i - j)) / denom_scale;
            num += w * observed[i * c + j];
            den += w * row[i] * col[j] / total;
        }
    }
    if (den == 0.0) throw MetricError("qwk: degenerate expected matrix");
    return 1.0 - num / den;
}

double theta_align(const std::vector<double>& abilities, const std::vector<int>& scores) {
    std::vector<double> s(scores.begin(), scores.end());
    return scc(abilities, s);
}

double fid(const std::vector<std::vector<double>>& set_a,
           const std::vector<std::vector<double>>& set_b) {
    check_set(set_a, "A");
    check_set(set_b, "B");
    if (set_a.front().size() != set_b.front().size())
        throw MetricError("fid: dimension mismatch between sets");
    const Eigen::Index dim = static_cast<Eigen::Index>(set_a.front().size());

    const Eigen::VectorXd mu1 = sample_mean(set_a, dim);
    const Eigen::VectorXd mu2 = sample_mean(set_b, dim);
    const Eigen::MatrixXd s1 = sample_cov(set_a, mu1);
    const Eigen::MatrixXd s2 = sample_cov(set_b, mu2);

    // Tr((S1 S2)^{1/2}) via the symmetric product sqrt(S1) S2 sqrt(S1);
    // negative eigenvalues from numerical noise are clamped to 0.
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es1(s1);
    Eigen::VectorXd ev1 = es1.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    const Eigen::MatrixXd root1 =
        es1.eigenvectors() * ev1.asDiagonal() * es1.eigenvectors().transpose();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es2(root1 * s2 * root1);
    const double tr_root = es2.eigenvalues().cwiseMax(0.0).cwiseSqrt().sum();

    const double d2 = (mu1 - mu2).squaredNorm() + s1.trace() + s2.trace() - 2.0 * tr_root;
    return std::max(0.0, d2);
}

double diversity_kl(const std::vector<std::vector<double>>& set_a,
                    const std::vector<std::vector<double>>& set_b,
                    int bins, double smoothing) {
    check_set(set_a, "A");
    check_set(set_b, "B");
    if (bins < 1) throw MetricError("diversity_kl: bins must be >= 1");

    auto histogram = [bins](const std::vector<std::vector<double>>& set) {
        const std::size_t dim = set.front().size();
        std::vector<double> norms(set.size());
        for (std::size_t i = 0; i < set.size(); ++i) {
            double s = 0.0;
            for (double v : set[i]) s += v * v;
            norms[i] = std::sqrt(s);
            if (norms[i] == 0.0) throw DomainError("diversity_kl: zero-norm vector");
        }
        std::vector<double> h(bins, 0.0);
        for (std::size_t i = 0; i < set.size(); ++i) {
            for (std::size_t j = i + 1; j < set.size(); ++j) {
                double dot = 0.0;
                for (std::size_t k = 0; k < dim; ++k) dot += set[i][k] * set[j][k];
                const double cosine = dot / (norms[i] * norms[j]);
                int bucket = static_cast<int>((cosine + 1.0) / 2.0 * bins);
                bucket = std::clamp(bucket, 0, bins - 1);
                h[bucket] += 1.0;
            }
        }
        return h;
    };

    std::vector<double> ha = histogram(set_a);
    std::vector<double> hb = histogram(set_b);
    double za = 0.0, zb = 0.0;
    for (int i = 0; i < bins; ++i) {
        ha[i] += smoothing;
        hb[i] += smoothing;
        za += ha[i];
        zb += hb[i];
    }
    double kl = 0.0;
    for (int i = 0; i < bins; ++i) {
        const double p = ha[i] / za;
        const double q = hb[i] / zb;
        kl += p * std::log(p / q);
    }
    return kl;
}

}  // namespace psychocal::metrics
