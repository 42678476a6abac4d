#include "singdeg/report.hpp"

#include "singdeg/error.hpp"
#include "singdeg/minmax.hpp"
#include "singdeg/pattern.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace singdeg {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

double parseNumber(std::string_view tok, std::size_t line) {
    tok = trim(tok);
    double value = 0.0;
    const auto* end = tok.data() + tok.size();
    auto [ptr, ec] = std::from_chars(tok.data(), end, value);
    if (tok.empty() || ec != std::errc{} || ptr != end || !std::isfinite(value))
        throw Error(ErrorCode::ParseError, "line " + std::to_string(line) + ": not a number: '" + std::string(tok) + "'");
    return value;
}

VarianceProfile fromRows(const std::vector<std::vector<double>>& rows) {
    const auto K = rows.size();
    if (K == 0) throw Error(ErrorCode::ParseError, "empty profile");
    Eigen::MatrixXd m(static_cast<Eigen::Index>(K), static_cast<Eigen::Index>(K));
    for (std::size_t i = 0; i < K; ++i) {
        if (rows[i].size() != K)
            throw Error(ErrorCode::ParseError, "row " + std::to_string(i + 1) + " has " +
                                                   std::to_string(rows[i].size()) + " entries, expected " +
                                                   std::to_string(K));
        for (std::size_t j = 0; j < K; ++j) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    }
    return VarianceProfile(m);
}

Json indices1(const IndexList& xs) {
    Json out = Json::array();
    for (auto x : xs) out.push_back(x + 1);
    return out;
}

Json rationals(const std::vector<Rational>& xs) {
    Json out = Json::array();
    for (const auto& x : xs) out.push_back(toString(x));
    return out;
}

Json doubles(const std::vector<double>& xs) { return Json(xs); }
Json doubles(const Eigen::VectorXd& xs) { return Json(std::vector<double>(xs.data(), xs.data() + xs.size())); }

Json maskJson(const ZeroPattern& p) {
    Json out = Json::array();
    for (Index i = 0; i < p.size(); ++i) {
        Json row = Json::array();
        for (Index j = 0; j < p.size(); ++j) row.push_back(p(i, j) ? 1 : 0);
        out.push_back(row);
    }
    return out;
}

void dump(const Json& j, std::string& out) {
    switch (j.type()) {
    case Json::value_t::object: {
        out += '{';
        bool first = true;
        for (auto it = j.begin(); it != j.end(); ++it) {
            if (!first) out += ',';
            first = false;
            out += Json(it.key()).dump();
            out += ':';
            dump(it.value(), out);
        }
        out += '}';
        break;
    }
    case Json::value_t::array: {
        out += '[';
        for (std::size_t i = 0; i < j.size(); ++i) {
            if (i) out += ',';
            dump(j[i], out);
        }
        out += ']';
        break;
    }
    case Json::value_t::number_float: {
        const double x = j.get<double>();
        if (!std::isfinite(x)) {
            out += "null";
            break;
        }
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.12g", x);
        out += buf;
        break;
    }
    default:
        out += j.dump();
    }
}

template <class F>
Json section(F&& body) {
    try {
        return body();
    } catch (const std::exception& e) {
        return Json{{"error", e.what()}};
    }
}

}  // namespace

VarianceProfile parseProfileCsv(std::string_view text) {
    std::vector<std::vector<double>> rows;
    std::size_t lineNo = 0;
    while (!text.empty()) {
        const auto nl = text.find('\n');
        auto line = trim(text.substr(0, nl));
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        ++lineNo;
        if (line.empty()) continue;
        std::vector<double> row;
        for (;;) {
            const auto comma = line.find(',');
            row.push_back(parseNumber(line.substr(0, comma), lineNo));
            if (comma == std::string_view::npos) break;
            line = line.substr(comma + 1);
        }
        rows.push_back(std::move(row));
    }
    return fromRows(rows);
}

VarianceProfile parseProfileJson(std::string_view text) {
    Json doc;
    try {
        doc = Json::parse(text);
    } catch (const Json::exception& e) {
        throw Error(ErrorCode::ParseError, e.what());
    }
    if (!doc.is_object() || !doc.contains("K") || !doc.contains("entries") || !doc["K"].is_number_integer() ||
        !doc["entries"].is_array())
        throw Error(ErrorCode::ParseError, "expected {\"K\": int, \"entries\": [[...]]}");
    const auto K = doc["K"].get<long long>();
    std::vector<std::vector<double>> rows;
    for (const auto& r : doc["entries"]) {
        if (!r.is_array()) throw Error(ErrorCode::ParseError, "entries must be a list of rows");
        std::vector<double> row;
        for (const auto& x : r) {
            if (!x.is_number()) throw Error(ErrorCode::ParseError, "non-numeric entry");
            row.push_back(x.get<double>());
        }
        rows.push_back(std::move(row));
    }
    if (K < 1 || static_cast<std::size_t>(K) != rows.size())
        throw Error(ErrorCode::ParseError, "K does not match the number of rows");
    return fromRows(rows);
}

VarianceProfile readProfile(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::ParseError, "cannot read " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    const std::string text = ss.str();
    const auto first = text.find_first_not_of(" \t\r\n");
    const bool json = (path.size() >= 5 && path.compare(path.size() - 5, 5, ".json") == 0) ||
                      (first != std::string::npos && text[first] == '{');
    return json ? parseProfileJson(text) : parseProfileCsv(text);
}

std::string canonicalDump(const Json& doc) {
    std::string out;
    dump(doc, out);
    out += '\n';
    return out;
}

Json classifyDocument(const VarianceProfile& S) {
    const auto cls = maximalZeroSubmatrix(S.pattern());
    Json doc{{"schema", 1}, {"K", S.size()}, {"support_class", name(cls.tag)}};
    if (cls.tag == SupportTag::NoSupport) {
        const auto form = noSupportNormalForm(S);
        auditNoSupportForm(S, form);
        doc["kappa"] = toString(form.kappa);
        doc["decomposition"] = {{"sizes", form.sizes},
                                {"permutation", indices1(form.perm)},
                                {"zero_rows", indices1(form.zeroRows)},
                                {"zero_columns", indices1(form.zeroColumns)}};
        return doc;
    }
    const auto nf = symmetricNormalForm(S);
    auditNormalForm(S, nf);
    const auto rel = buildRelation(nf);
    const auto chain = longestChain(rel);
    const auto ex = indexExponents(rel);
    doc["kappa"] = nullptr;
    doc["L"] = nf.L;
    doc["M"] = nf.M;
    doc["block_dims"] = nf.dims;
    doc["permutation"] = indices1(nf.perm);
    doc["mask"] = maskJson(nf.mask);
    Json edges = Json::array();
    for (auto [i, j] : rel.edges) edges.push_back({i + 1, j + 1});
    doc["relation_edges"] = edges;
    doc["longest_chain"] = {{"length", chain.length}, {"witness", indices1(chain.witness)}};
    doc["sigma"] = toString(ex.sigma);
    doc["Q"] = ex.Q;
    doc["f"] = rationals(ex.f);
    return doc;
}

Json scalingSection(const ScalingFit& fit) {
    Json blocks = Json::array();
    double worst = 0.0;
    for (std::size_t b = 0; b < fit.fittedSlopes.size(); ++b) {
        const double err = std::abs(fit.deviation[b]);
        worst = std::max(worst, err);
        blocks.push_back({{"block", b + 1},
                          {"f_pred", toString(fit.predicted[b])},
                          {"slope_fit", fit.fittedSlopes[b]},
                          {"abs_err", err}});
    }
    return {{"eta_min", fit.etaGrid.back()},
            {"eta_max", fit.etaGrid.front()},
            {"points", fit.etaGrid.size()},
            {"blocks", blocks},
            {"max_abs_err", worst}};
}

Json sweepSection(const SweepReport& rep, const Rational& sigma) {
    Json sizes = Json::array();
    for (const auto& s : rep.sizes)
        sizes.push_back({{"size_n", s.n},
                         {"dim_N", s.N},
                         {"mean_smin", s.meanSmin},
                         {"stderr_smin", s.stderrSmin},
                         {"mean_cond", s.meanCond}});
    return {{"sizes", sizes},
            {"fitted_slope", rep.fittedSlope},
            {"intercept", rep.intercept},
            {"fit_residual", rep.fitResidual},
            {"predicted_slope", -1.0 / (1.0 - toDouble(sigma))}};
}

Json fullReport(const VarianceProfile& S, const ReportOptions& opt) {
    Json doc = classifyDocument(S);
    const bool supported = doc["support_class"] != name(SupportTag::NoSupport);
    Rational sigma(0);
    if (supported) {
        sigma = parseRational(doc["sigma"].get<std::string>());
        doc["scaling_fit"] = section([&] { return scalingSection(empiricalExponents(S, opt.etaMin, opt.etaMax, opt.perDecade)); });
        RescaledData data = rescaledProfile(S);
        Json lw = section([&] {
            const auto grid = geometricGrid(opt.limitEtaMin, 100.0 * opt.limitEtaMin, 1);
            const auto r = limitWeights(S, data, grid, opt.limitOrder);
            data.w = r.w;
            return Json{{"w", doubles(r.w)},
                        {"mde_residual", r.mdeResidual},
                        {"eta_used", doubles(r.etaUsed)},
                        {"order", opt.limitOrder}};
        });
        doc["limit_weights"] = lw;
        if (lw.contains("error")) {
            doc["residuals"] = {{"error", "limit weights unavailable"}};
        } else {
            doc["residuals"] = section([&] {
                const auto r = rescaledResiduals(data, data.w);
                return Json{{"F0", r.F0}, {"Fl", doubles(r.Fl)}};
            });
        }
    } else {
        doc["atom_mass"] = section([&] {
            const auto a = atomMassEstimate(S, {1e-8});
            return Json{{"kappa_numeric", a.kappaNumeric}, {"kappa_exact", toString(a.kappaExact)}, {"eta", a.eta}};
        });
    }
    if (opt.withMc) {
        doc["sweep"] = section([&] {
            if (!supported) throw Error(ErrorCode::NoSupport, "sweep needs a profile with support");
            EnsembleConfig cfg{S, opt.sizes, opt.trials, opt.seed};
            return sweepSection(runSweep(cfg, opt.threads), sigma);
        });
    }
    return doc;
}

}  // namespace singdeg
