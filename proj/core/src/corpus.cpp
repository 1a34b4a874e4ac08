#include "poirec/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "poirec/errors.hpp"

namespace poirec {

using nlohmann::json;

std::string to_string(TripType v) {
  switch (v) {
    case TripType::business: return "business";
    case TripType::holiday: return "holiday";
    case TripType::other: return "other";
  }
  return "other";
}

std::string to_string(TripDuration v) {
  switch (v) {
    case TripDuration::day_trip: return "day-trip";
    case TripDuration::longer: return "longer";
    case TripDuration::night_out: return "night-out";
    case TripDuration::weekend_trip: return "weekend-trip";
  }
  return "day-trip";
}

std::string to_string(AccompaniedBy v) {
  switch (v) {
    case AccompaniedBy::alone: return "alone";
    case AccompaniedBy::family: return "family";
    case AccompaniedBy::friends: return "friends";
    case AccompaniedBy::other: return "other";
  }
  return "alone";
}

TripType trip_type_from_string(std::string_view s) {
  if (s == "business") return TripType::business;
  if (s == "holiday") return TripType::holiday;
  if (s == "other") return TripType::other;
  throw DataError("illegal trip-type value: " + std::string(s));
}

TripDuration trip_duration_from_string(std::string_view s) {
  if (s == "day-trip") return TripDuration::day_trip;
  if (s == "longer") return TripDuration::longer;
  if (s == "night-out") return TripDuration::night_out;
  if (s == "weekend-trip") return TripDuration::weekend_trip;
  throw DataError("illegal trip-duration value: " + std::string(s));
}

AccompaniedBy accompanied_by_from_string(std::string_view s) {
  if (s == "alone") return AccompaniedBy::alone;
  if (s == "family") return AccompaniedBy::family;
  if (s == "friends") return AccompaniedBy::friends;
  if (s == "other") return AccompaniedBy::other;
  throw DataError("illegal accompanied-by value: " + std::string(s));
}

std::string TripContext::key() const {
  return to_string(trip_type) + "|" + to_string(trip_duration) + "|" +
         to_string(accompanied_by);
}

namespace {

std::vector<std::string> canonical_tags(const json& arr, const PipelineConfig& pipeline,
                                        const std::string& where) {
  std::set<std::string> keys;
  for (const auto& t : arr) {
    if (!t.is_string()) throw DataError(where + ": tag is not a string");
    std::string key = canonical_phrase(t.get<std::string>(), pipeline);
    if (!key.empty()) keys.insert(std::move(key));
  }
  return {keys.begin(), keys.end()};
}

json parse_line(const std::string& line, const std::string& path, size_t lineno) {
  json j = json::parse(line, nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    throw DataError(path + ":" + std::to_string(lineno) + ": malformed JSON line");
  }
  return j;
}

std::string require_string(const json& j, const char* field, const std::string& where) {
  auto it = j.find(field);
  if (it == j.end() || !it->is_string() || it->get<std::string>().empty()) {
    throw DataError(where + ": missing or empty field '" + field + "'");
  }
  return it->get<std::string>();
}

}  // namespace

std::vector<PoiDocument> load_pois(const std::string& path, const PipelineConfig& pipeline) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open POI corpus: " + path);

  std::vector<PoiDocument> docs;
  std::unordered_set<std::string> seen;
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const std::string where = path + ":" + std::to_string(lineno);
    json j = parse_line(line, path, lineno);

    PoiDocument doc;
    doc.id = require_string(j, "id", where);
    doc.city = require_string(j, "city", where);
    if (!seen.insert(doc.id).second) {
      throw DataError(where + ": duplicate POI id '" + doc.id + "'");
    }

    std::string text = j.value("text", std::string{});
    doc.tokens = tokenize(text, pipeline);

    if (auto it = j.find("tags"); it != j.end() && !it->is_null()) {
      if (!it->is_array()) throw DataError(where + ": 'tags' must be an array");
      doc.tags = canonical_tags(*it, pipeline, where);
      // Tag tokens become part of the bag-of-words so tag-term
      // co-occurrence exists inside the document itself.
      for (const auto& t : *it) {
        for (auto& tok : tag_tokens(t.get<std::string>(), pipeline)) {
          doc.tokens.push_back(std::move(tok));
        }
      }
    }
    if (doc.tokens.empty() && doc.tags.empty()) {
      throw DataError(where + ": document '" + doc.id + "' has neither text tokens nor tags");
    }
    docs.push_back(std::move(doc));
  }
  return docs;
}

double normalize_rating(int raw, int min, int max) {
  if (min >= max) throw DataError("rating bounds require min < max");
  if (raw < min || raw > max) {
    throw DataError("rating " + std::to_string(raw) + " outside [" + std::to_string(min) +
                    "," + std::to_string(max) + "]");
  }
  return static_cast<double>(raw - min) / static_cast<double>(max - min);
}

std::vector<UserProfile> load_profiles(const std::string& path, const PipelineConfig& pipeline,
                                       int rating_min, int rating_max) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open profiles: " + path);

  std::vector<UserProfile> profiles;
  std::unordered_set<std::string> seen;
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const std::string where = path + ":" + std::to_string(lineno);
    json j = parse_line(line, path, lineno);

    UserProfile p;
    p.user_id = require_string(j, "user_id", where);
    p.location = require_string(j, "location", where);
    if (!seen.insert(p.user_id).second) {
      throw DataError(where + ": duplicate user_id '" + p.user_id + "'");
    }

    if (auto it = j.find("context"); it != j.end() && !it->is_null()) {
      const json& c = *it;
      TripContext ctx;
      ctx.trip_type = trip_type_from_string(require_string(c, "trip_type", where));
      ctx.trip_duration = trip_duration_from_string(require_string(c, "trip_duration", where));
      ctx.accompanied_by = accompanied_by_from_string(require_string(c, "accompanied_by", where));
      p.context = ctx;
    }

    auto prefs = j.find("preferences");
    if (prefs == j.end() || !prefs->is_array() || prefs->empty()) {
      throw DataError(where + ": profile '" + p.user_id + "' has no preferences");
    }
    for (const auto& pr : *prefs) {
      PreferenceTriple t;
      t.doc_id = require_string(pr, "doc_id", where);
      if (auto tt = pr.find("tags"); tt != pr.end() && !tt->is_null()) {
        if (!tt->is_array()) throw DataError(where + ": preference 'tags' must be an array");
        t.tags = canonical_tags(*tt, pipeline, where);
      }
      auto rt = pr.find("rating");
      if (rt == pr.end() || !rt->is_number_integer()) {
        throw DataError(where + ": preference 'rating' must be an integer");
      }
      t.rating_raw = rt->get<int>();
      t.rating = normalize_rating(t.rating_raw, rating_min, rating_max);
      p.preferences.push_back(std::move(t));
    }
    profiles.push_back(std::move(p));
  }
  return profiles;
}

UserProfile relevant_subset(const UserProfile& profile, double threshold) {
  if (threshold < 0.0 || threshold > 1.0) throw DataError("threshold must be in [0,1]");
  UserProfile out;
  out.user_id = profile.user_id;
  out.location = profile.location;
  out.context = profile.context;
  for (const auto& t : profile.preferences) {
    if (t.rating >= threshold) out.preferences.push_back(t);
  }
  if (out.preferences.empty()) {
    throw DegenerateEstimate("user '" + profile.user_id +
                             "': no relevant history at threshold " + std::to_string(threshold));
  }
  return out;
}

std::vector<std::string> tag_union(const UserProfile& profile) {
  std::set<std::string> tags;
  for (const auto& t : profile.preferences) {
    tags.insert(t.tags.begin(), t.tags.end());
  }
  return {tags.begin(), tags.end()};
}

}  // namespace poirec
