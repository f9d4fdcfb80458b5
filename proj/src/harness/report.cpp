#include "egrl/harness/report.hpp"

#include "egrl/envs/env.hpp"

#include "egrl/stats/stats.hpp"

#include <json.hpp>

#include <algorithm>
#include <map>
#include <sstream>

namespace egrl::harness {

std::optional<size_t> first_permanent_crossing(const std::vector<double>& eval_returns,
                                               double threshold) {
    std::optional<size_t> candidate;
    for (size_t i = eval_returns.size(); i-- > 0;) {
        if (eval_returns[i] >= threshold) {
            candidate = i;
        } else {
            break;  // everything before this index un-crosses
        }
    }
    return candidate;
}

namespace {

struct RowKey {
    std::string method;
    std::string pert_type;
    double sigma = 0.0;

    bool operator<(const RowKey& o) const {
        if (method != o.method) return method < o.method;
        if (pert_type != o.pert_type) return pert_type < o.pert_type;
        return sigma < o.sigma;
    }

    std::string label() const {
        if (pert_type == "none" || sigma == 0.0) return method;
        std::ostringstream s;
        s << method << "@" << pert_type << "=" << sigma;
        return s.str();
    }
};

std::string fmt(double v, int prec = 3) {
    if (std::isnan(v)) return "-";
    std::ostringstream s;
    s.setf(std::ios::fixed);
    s.precision(prec);
    s << v;
    return s.str();
}

}  // namespace

ReportTables make_report(const std::vector<RunRecord>& records, const ReportOptions& opt) {
    if (records.empty()) throw std::invalid_argument("report: no records");

    const std::string env = records.front().env;
    auto proto = nlohmann::json::parse(records.front().config_json);
    auto protocol_of = [](const nlohmann::json& j) {
        return std::tuple<long long, long long, int, double>(
            j.at("total_steps").get<long long>(), j.at("eval_interval").get<long long>(),
            j.at("eval_episodes").get<int>(), j.at("final_window_fraction").get<double>());
    };
    const auto protocol = protocol_of(proto);
    for (const auto& r : records) {
        if (r.env != env) throw std::invalid_argument("report: mixed envs in record set");
        if (protocol_of(nlohmann::json::parse(r.config_json)) != protocol)
            throw std::invalid_argument("report: mixed evaluation protocols in record set");
        if (r.aborted) throw std::invalid_argument("report: aborted record in set");
    }

    std::map<RowKey, std::vector<const RunRecord*>> groups;
    for (const auto& r : records)
        groups[{r.method, r.perturbation.type, r.perturbation.sigma}].push_back(&r);

    const auto env_spec = envs::make_env(env)->spec();
    const double j_ref = env_spec.j_ref;

    // The ENA denominator always uses the unperturbed expert return.
    double j_exp = std::numeric_limits<double>::quiet_NaN();
    for (const auto& r : records)
        if (!std::isnan(r.expert_return_unperturbed)) {
            if (!std::isnan(j_exp) && std::abs(j_exp - r.expert_return_unperturbed) > 1e-9)
                throw std::invalid_argument("report: inconsistent expert-return provenance");
            j_exp = r.expert_return_unperturbed;
        }

    struct Row {
        RowKey key;
        std::vector<double> scalars;
        double iqm = 0.0;
        stats::Interval ci{};
        double p_raw = std::numeric_limits<double>::quiet_NaN();
        double p_corr = std::numeric_limits<double>::quiet_NaN();
        std::string marker;
    };
    std::vector<Row> rows;
    for (const auto& [key, recs] : groups) {
        Row row;
        row.key = key;
        for (const auto* r : recs) row.scalars.push_back(r->final_window_scalar);
        if (row.scalars.size() >= 4) {
            row.iqm = stats::iqm(row.scalars);
            row.ci = stats::bootstrap_ci_iqm(row.scalars, opt.bootstrap_resamples,
                                             opt.bootstrap_seed);
        } else {
            row.iqm = std::numeric_limits<double>::quiet_NaN();
            row.ci = {row.iqm, row.iqm};
        }
        rows.push_back(std::move(row));
    }

    // Mann-Whitney battery vs the sac anchor at matching perturbation,
    // Holm-corrected over the expert-using family.
    auto anchor_scalars = [&](const RowKey& key) -> const std::vector<double>* {
        for (const auto& r : rows)
            if (r.key.method == "sac" && r.key.pert_type == key.pert_type &&
                r.key.sigma == key.sigma)
                return &r.scalars;
        for (const auto& r : rows)
            if (r.key.method == "sac") return &r.scalars;
        return nullptr;
    };
    std::vector<size_t> family;
    std::vector<double> raw_ps;
    for (size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].key.method == "sac" || rows[i].key.method == "expert") continue;
        const auto* anchor = anchor_scalars(rows[i].key);
        if (anchor == nullptr || anchor->empty() || rows[i].scalars.empty()) continue;
        rows[i].p_raw = stats::mann_whitney_two_sided(rows[i].scalars, *anchor).p;
        family.push_back(i);
        raw_ps.push_back(rows[i].p_raw);
    }
    if (!raw_ps.empty()) {
        const auto corrected = stats::holm_bonferroni(raw_ps);
        for (size_t k = 0; k < family.size(); ++k) {
            rows[family[k]].p_corr = corrected[k];
            rows[family[k]].marker = stats::significance_marker(corrected[k]);
        }
    }

    ReportTables out;
    {
        std::ostringstream text, csv;
        text << "env: " << env << "   (IQM of per-seed final-window returns; "
             << "95% bootstrap CI; Mann-Whitney U vs sac, Holm-corrected)\n";
        text << "method                         seeds  IQM         CI_lo       CI_hi       p_corr   sig\n";
        csv << "env,method,perturbation,sigma,seeds,iqm,ci_lo,ci_hi,p_raw,p_corr,marker\n";
        for (const auto& r : rows) {
            std::ostringstream label;
            label << r.key.label();
            text << label.str() << std::string(std::max<int>(1, 31 - static_cast<int>(label.str().size())), ' ')
                 << r.scalars.size() << "      " << fmt(r.iqm) << "   " << fmt(r.ci.lo) << "   "
                 << fmt(r.ci.hi) << "   " << fmt(r.p_corr, 4) << "   " << r.marker << "\n";
            csv << env << ',' << r.key.method << ',' << r.key.pert_type << ',' << r.key.sigma
                << ',' << r.scalars.size() << ',' << fmt(r.iqm, 6) << ',' << fmt(r.ci.lo, 6) << ','
                << fmt(r.ci.hi, 6) << ',' << fmt(r.p_raw, 6) << ',' << fmt(r.p_corr, 6) << ','
                << r.marker << "\n";
        }
        out.main_text = text.str();
        out.main_csv = csv.str();
    }

    {
        std::ostringstream csv;
        csv << "env,method,perturbation,sigma,iqm,ena,j_exp,j_ref\n";
        for (const auto& r : rows) {
            std::string ena_s = "-";
            if (!std::isnan(j_exp) && !std::isnan(r.iqm) && j_ref > j_exp)
                ena_s = fmt(stats::ena(r.iqm, j_exp, j_ref).value, 6);
            csv << env << ',' << r.key.method << ',' << r.key.pert_type << ',' << r.key.sigma
                << ',' << fmt(r.iqm, 6) << ',' << ena_s << ',' << fmt(j_exp, 6) << ','
                << fmt(j_ref, 6) << "\n";
        }
        out.ena_csv = csv.str();
    }

    {
        std::ostringstream csv;
        csv << "env,method,perturbation,sigma,threshold,n_crossed,n_total,iqm_crossing_step,"
               "budget_censored\n";
        for (const auto& [key, recs] : groups) {
            for (const double frac : opt.threshold_fractions) {
                const double thr = frac * j_ref;
                std::vector<double> steps;
                for (const auto* r : recs) {
                    const auto k = first_permanent_crossing(r->eval_returns, thr);
                    if (k) steps.push_back(static_cast<double>(r->eval_steps[*k]));
                }
                const bool censored = steps.size() < recs.size();
                std::string iqm_s = "-";
                if (steps.size() >= 4) iqm_s = fmt(stats::iqm(steps), 1);
                csv << env << ',' << key.method << ',' << key.pert_type << ',' << key.sigma << ','
                    << fmt(thr, 3) << ',' << steps.size() << ',' << recs.size() << ',' << iqm_s
                    << ',' << (censored ? 1 : 0) << "\n";
            }
        }
        out.crossings_csv = csv.str();
    }

    return out;
}

}  // namespace egrl::harness
