#pragma once

// Profile files (CSV or JSON) and the JSON report document.

#include "singdeg/dyson.hpp"
#include "singdeg/montecarlo.hpp"
#include "singdeg/normal_form.hpp"

#include <json.hpp>

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace singdeg {

using Json = nlohmann::json;

/// K lines of K comma-separated non-negative decimals. Throws ParseError,
/// NotSymmetric, NegativeEntry.
VarianceProfile parseProfileCsv(std::string_view text);
/// {"K": k, "entries": [[...], ...]}
VarianceProfile parseProfileJson(std::string_view text);
/// JSON when the extension is .json or the first non-blank character is '{'.
VarianceProfile readProfile(const std::string& path);

/// Sorted keys, no whitespace, floats as %.12g, one trailing newline.
std::string canonicalDump(const Json& doc);

/// Combinatorial part of the report; indices are 1-based.
Json classifyDocument(const VarianceProfile& S);

Json scalingSection(const ScalingFit& fit);
Json sweepSection(const SweepReport& rep, const Rational& sigma);

struct ReportOptions {
    double etaMin = 1e-10;
    double etaMax = 1e-2;
    int perDecade = 4;
    double limitEtaMin = 1e-12;  ///< smallest eta for the limit weights
    int limitOrder = 1;
    bool withMc = false;
    std::vector<Index> sizes{32, 64, 128, 256, 512};
    int trials = 200;
    std::uint64_t seed = 1;
    int threads = 0;
};

/// Classification plus numeric sections; a failing section becomes {"error": "..."}.
Json fullReport(const VarianceProfile& S, const ReportOptions& opt = {});

}  // namespace singdeg
