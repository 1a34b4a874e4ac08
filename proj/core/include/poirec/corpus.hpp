#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "poirec/text_pipeline.hpp"

namespace poirec {

enum class TripType { business, holiday, other };
enum class TripDuration { day_trip, longer, night_out, weekend_trip };
enum class AccompaniedBy { alone, family, friends, other };

std::string to_string(TripType v);
std::string to_string(TripDuration v);
std::string to_string(AccompaniedBy v);
TripType trip_type_from_string(std::string_view s);
TripDuration trip_duration_from_string(std::string_view s);
AccompaniedBy accompanied_by_from_string(std::string_view s);

/// The non-location trip qualifiers of a user's current context.
struct TripContext {
  TripType trip_type = TripType::other;
  TripDuration trip_duration = TripDuration::day_trip;
  AccompaniedBy accompanied_by = AccompaniedBy::alone;

  bool operator==(const TripContext&) const = default;
  /// Stable key "trip_type|trip_duration|accompanied_by".
  std::string key() const;
};

/// Bag-of-words POI descriptor. Tokens are pipeline output for the text,
/// with tag tokens appended (joined unit plus constituents) so that
/// tag-term co-occurrence is observable within the document itself.
struct PoiDocument {
  std::string id;
  std::string city;
  std::vector<std::string> tokens;
  std::vector<std::string> tags;  // canonical joined-unit keys, sorted, deduped
};

/// One rated POI in a user's preference history.
struct PreferenceTriple {
  std::string doc_id;
  std::vector<std::string> tags;  // canonical joined-unit keys
  int rating_raw = 0;
  double rating = 0.0;  // min-max normalized to [0,1]
};

struct UserProfile {
  std::string user_id;
  std::vector<PreferenceTriple> preferences;
  std::string location;                // current city, the hard constraint
  std::optional<TripContext> context;  // current trip qualifiers, if any
};

/// Loads a JSON-lines POI corpus: {"id","city","text","tags"?} per line.
/// Duplicate ids and malformed lines raise DataError naming the offender.
std::vector<PoiDocument> load_pois(const std::string& path, const PipelineConfig& pipeline);

/// Loads JSON-lines user profiles. Integer preference ratings are
/// min-max normalized with the given bounds.
std::vector<UserProfile> load_profiles(const std::string& path, const PipelineConfig& pipeline,
                                       int rating_min = -1, int rating_max = 4);

/// (raw - min) / (max - min). Throws DataError if raw is out of range.
double normalize_rating(int raw, int min, int max);

/// Preference triples with rating >= threshold, order preserved.
/// Throws DegenerateEstimate when nothing passes (estimators need history).
UserProfile relevant_subset(const UserProfile& profile, double threshold);

/// Union of tag keys over a profile's triples, sorted and deduped.
std::vector<std::string> tag_union(const UserProfile& profile);

}  // namespace poirec
