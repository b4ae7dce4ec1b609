#pragma once

// JSON form of the extraction report.

#include <json.hpp>

#include "twsep/rotation.hpp"

namespace twsep {

inline nlohmann::ordered_json report_json(const ExtractionReport& r) {
	using nlohmann::ordered_json;
	auto word_or_null = [](const std::optional<Word>& w) { return w ? ordered_json(to_string(*w)) : ordered_json(nullptr); };
	ordered_json j;
	j["verified"] = r.verified();
	j["exhausted"] = r.exhausted();
	j["search_bound"] = r.search.bound;
	j["candidates_checked"] = r.search.candidates;
	j["behaviors"] = r.behaviors;
	j["minimized_states"] = r.minimized_states;
	if (r.search.witness) {
		j["witness"] = {{"term", to_string(r.search.witness->term.tree())},
		                {"found_at_size", r.search.witness->found_at_size},
		                {"fingerprint", r.search.witness->fingerprint}};
	} else {
		j["witness"] = nullptr;
	}
	j["dfa"] = r.separator ? ordered_json(write_dfa(*r.separator)) : ordered_json(nullptr);
	j["violation_g"] = word_or_null(r.verification.violation_g);
	j["violation_h"] = word_or_null(r.verification.violation_h);
	return j;
}

} // namespace twsep
