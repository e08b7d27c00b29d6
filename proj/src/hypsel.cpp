#include "invgen/hypsel.hpp"

#include <algorithm>
#include <cmath>

#include "invgen/estimate.hpp"

namespace invgen {

namespace {

Assignment draw_retry(const BottomSampler& s, std::uint64_t retries, Rng& rng, bool* ok) {
    for (std::uint64_t i = 0; i < retries; ++i) {
        auto x = s.generate(rng);
        if (x) {
            if (ok) *ok = true;
            return *x;
        }
    }
    if (ok) {
        *ok = false;
        return Assignment{};
    }
    throw sampler_failure("sampler exhausted its bottom-retry budget");
}

double region_fraction(const std::vector<double>& rho_i, const std::vector<double>& rho_j) {
    if (rho_i.empty()) return 0.0;
    std::size_t hits = 0;
    for (std::size_t t = 0; t < rho_i.size(); ++t)
        if (rho_i[t] >= rho_j[t]) ++hits;
    return static_cast<double>(hits) / static_cast<double>(rho_i.size());
}

// Competition on already-materialized evaluation values. rho_*_on_i are the
// candidates' eval values on samples drawn from D_i, etc.
CompetitionOutcome compete_on_values(const std::vector<double>& rho_i_on_i,
                                     const std::vector<double>& rho_j_on_i,
                                     const std::vector<double>& rho_i_on_j,
                                     const std::vector<double>& rho_j_on_j,
                                     const std::vector<double>& rho_i_on_target,
                                     const std::vector<double>& rho_j_on_target, int label_i,
                                     int label_j, double eps_prime) {
    const double p = region_fraction(rho_i_on_i, rho_j_on_i);
    const double q = region_fraction(rho_i_on_j, rho_j_on_j);
    if (p - q <= 4.5 * eps_prime) {
        CompetitionOutcome out;
        out.p_region = p;
        out.q_region = q;
        out.delta_hat = p - q;
        out.winner = std::nullopt;
        return out;
    }
    const double tau = region_fraction(rho_i_on_target, rho_j_on_target);
    return decide_competition(p, q, tau, eps_prime, label_i, label_j);
}

std::vector<double> eval_on(const std::function<double(const Assignment&)>& eval,
                            const std::vector<Assignment>& xs) {
    std::vector<double> out;
    out.reserve(xs.size());
    for (const Assignment& x : xs) out.push_back(eval(x));
    return out;
}

} // namespace

CompetitionOutcome decide_competition(double p_region, double q_region, double tau_hat,
                                      double eps_prime, int label_i, int label_j) {
    CompetitionOutcome out;
    out.p_region = p_region;
    out.q_region = q_region;
    out.delta_hat = p_region - q_region;
    out.tau_hat = tau_hat;
    if (out.delta_hat <= 4.5 * eps_prime) {
        out.winner = std::nullopt;
    } else if (tau_hat > p_region - 1.625 * eps_prime) {
        out.winner = label_i;
    } else if (tau_hat < q_region + 1.625 * eps_prime) {
        out.winner = label_j;
    } else {
        out.winner = std::nullopt;
    }
    return out;
}

double estimate_region_mass(const CandidateDistribution& i, const CandidateDistribution& j,
                            const BottomSampler& draw_from, double gamma, double delta, Rng& rng) {
    if (!(gamma > 0.0 && gamma < 1.0) || !(delta > 0.0 && delta < 1.0))
        throw invalid_input_error("estimate_region_mass needs gamma, delta in (0,1)");
    const std::uint64_t m = chernoff_samples(gamma, delta);
    std::uint64_t hits = 0;
    for (std::uint64_t t = 0; t < m; ++t) {
        const Assignment x = draw_retry(draw_from, 100, rng, nullptr);
        if (i.eval(x) >= j.eval(x)) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(m);
}

CompetitionOutcome choose_hypothesis(const BottomSampler& target_source,
                                     const CandidateDistribution& i,
                                     const CandidateDistribution& j, double eps_prime,
                                     double delta_prime, Rng& rng) {
    if (!(eps_prime > 0.0 && eps_prime < 1.0) || !(delta_prime > 0.0 && delta_prime < 1.0))
        throw invalid_input_error("choose_hypothesis needs eps', delta' in (0,1)");
    // Canonical order makes the outcome independent of argument order even
    // in the presence of eval ties.
    if (j.label < i.label) return choose_hypothesis(target_source, j, i, eps_prime, delta_prime, rng);

    const std::uint64_t m_est = chernoff_samples(eps_prime / 8.0, delta_prime / 4.0);
    std::vector<Assignment> from_i, from_j;
    from_i.reserve(m_est);
    from_j.reserve(m_est);
    for (std::uint64_t t = 0; t < m_est; ++t) from_i.push_back(draw_retry(i.sampler, 100, rng, nullptr));
    for (std::uint64_t t = 0; t < m_est; ++t) from_j.push_back(draw_retry(j.sampler, 100, rng, nullptr));

    const std::uint64_t m_target = static_cast<std::uint64_t>(
        std::ceil((8.0 / (eps_prime * eps_prime)) * std::log(2.0 / delta_prime)));
    std::vector<Assignment> target;
    target.reserve(m_target);
    for (std::uint64_t t = 0; t < m_target; ++t)
        target.push_back(draw_retry(target_source, 100, rng, nullptr));

    return compete_on_values(eval_on(i.eval, from_i), eval_on(j.eval, from_i),
                             eval_on(i.eval, from_j), eval_on(j.eval, from_j),
                             eval_on(i.eval, target), eval_on(j.eval, target), i.label, j.label,
                             eps_prime);
}

TournamentResult tournament(const BottomSampler& target_source,
                            const std::vector<CandidateDistribution>& candidates, double epsilon,
                            double delta, Rng& rng) {
    const std::size_t n_cand = candidates.size();
    if (n_cand == 0) throw invalid_input_error("tournament needs at least one candidate");
    if (!(epsilon > 0.0 && epsilon < 1.0) || !(delta > 0.0 && delta < 1.0))
        throw invalid_input_error("tournament needs epsilon, delta in (0,1)");
    TournamentResult result;
    result.matrix.assign(n_cand, std::vector<CompetitionOutcome>(n_cand));
    if (n_cand == 1) {
        result.winner_index = 0;
        return result;
    }

    const double dn = static_cast<double>(n_cand);
    const std::uint64_t m = static_cast<std::uint64_t>(std::ceil(
        (8.0 / (epsilon * epsilon)) * (std::log(dn) + std::log(2.0 / delta))));
    const std::uint64_t retries = static_cast<std::uint64_t>(std::ceil(
        20.0 * std::log(2.0 * dn * static_cast<double>(m) / delta)));

    // Shared draw phase.
    std::vector<Assignment> target;
    target.reserve(m);
    for (std::uint64_t t = 0; t < m; ++t)
        target.push_back(draw_retry(target_source, retries, rng, nullptr));

    std::vector<std::vector<Assignment>> cand_samples(n_cand);
    std::vector<bool> alive(n_cand, true);
    for (std::size_t k = 0; k < n_cand; ++k) {
        cand_samples[k].reserve(m);
        for (std::uint64_t t = 0; t < m; ++t) {
            bool ok = false;
            Assignment x = draw_retry(candidates[k].sampler, retries, rng, &ok);
            if (!ok) {
                // Exhausted sampler: the candidate forfeits (folded into delta).
                alive[k] = false;
                break;
            }
            cand_samples[k].push_back(std::move(x));
        }
    }

    // Precompute every eval array once: rho[k][a] = eval_k over array a,
    // where array 0 is the target sample and array 1+k is candidate k's.
    std::vector<std::vector<std::vector<double>>> rho(n_cand);
    for (std::size_t k = 0; k < n_cand; ++k) {
        rho[k].resize(n_cand + 1);
        rho[k][0] = eval_on(candidates[k].eval, target);
        for (std::size_t a = 0; a < n_cand; ++a)
            if (alive[a]) rho[k][a + 1] = eval_on(candidates[k].eval, cand_samples[a]);
    }

    std::vector<bool> lost(n_cand, false);
    for (std::size_t i = 0; i < n_cand; ++i) {
        for (std::size_t j = i + 1; j < n_cand; ++j) {
            CompetitionOutcome out;
            if (!alive[i] && !alive[j]) {
                out.winner = std::nullopt;
            } else if (!alive[i]) {
                out.winner = static_cast<int>(j);
                lost[i] = true;
            } else if (!alive[j]) {
                out.winner = static_cast<int>(i);
                lost[j] = true;
            } else {
                out = compete_on_values(rho[i][i + 1], rho[j][i + 1], rho[i][j + 1], rho[j][j + 1],
                                        rho[i][0], rho[j][0], static_cast<int>(i),
                                        static_cast<int>(j), epsilon);
                if (out.winner) {
                    if (*out.winner == static_cast<int>(i)) lost[j] = true;
                    else lost[i] = true;
                }
            }
            result.matrix[i][j] = out;
        }
    }

    for (std::size_t i = 0; i < n_cand; ++i) {
        if (!lost[i] && alive[i]) {
            result.winner_index = static_cast<int>(i);
            return result;
        }
    }
    throw algorithm_failure("tournament found no never-loser");
}

} // namespace invgen
