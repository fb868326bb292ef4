#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <mutex>
#include <shared_mutex>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "sealevel/domain.hpp"

namespace sealevel {

class StorageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Closed lat/lon box. No antimeridian wrap: callers split boxes that cross it.
class BoundingBox {
public:
    static BoundingBox make(double min_lat, double max_lat, double min_lon, double max_lon);
    static BoundingBox world() { return make(-90.0, 90.0, -180.0, 180.0); }

    double min_lat() const { return min_lat_; }
    double max_lat() const { return max_lat_; }
    double min_lon() const { return min_lon_; }
    double max_lon() const { return max_lon_; }

    bool contains(const GeoPoint& p) const {
        return p.latitude >= min_lat_ && p.latitude <= max_lat_ &&
               p.longitude >= min_lon_ && p.longitude <= max_lon_;
    }

private:
    BoundingBox(double min_lat, double max_lat, double min_lon, double max_lon)
        : min_lat_(min_lat), max_lat_(max_lat), min_lon_(min_lon), max_lon_(max_lon) {}
    double min_lat_, max_lat_, min_lon_, max_lon_;
};

enum class NamedKind { Area, Publication };
enum class ObservationFilter { Area, Publication };

namespace detail {
struct SpatialIndex;
}

/// All five tables plus their secondary indexes. Not synchronized; Store
/// wraps one of these behind a reader/writer lock.
///
/// Inserts come in two steps: prepare_* validates against the current
/// contents and returns the entity with its would-be id, insert() commits
/// it. add_* does both.
class StoreSnapshot {
public:
    StoreSnapshot();
    StoreSnapshot(const StoreSnapshot& other);
    StoreSnapshot& operator=(const StoreSnapshot& other);
    StoreSnapshot(StoreSnapshot&&) noexcept;
    StoreSnapshot& operator=(StoreSnapshot&&) noexcept;
    ~StoreSnapshot();

    Area prepare_area(std::string_view name) const;
    Publication prepare_publication(std::string_view title, std::string_view authors,
                                    int year) const;
    Indicator prepare_indicator(std::string_view name) const;
    Observation prepare_observation(const ObservationPayload& payload) const;
    VerticalLandMovement prepare_vlm(const VlmPayload& payload) const;

    void insert(Area area);
    void insert(Publication publication);
    void insert(Indicator indicator);
    void insert(Observation observation);
    void insert(VerticalLandMovement vlm);

    AreaId add_area(std::string_view name);
    PublicationId add_publication(std::string_view title, std::string_view authors, int year);
    IndicatorId add_indicator(std::string_view name);
    ObservationId add_observation(const ObservationPayload& payload);
    VlmId add_vlm(const VlmPayload& payload);

    const std::vector<Area>& areas() const { return areas_; }
    const std::vector<Publication>& publications() const { return publications_; }
    const std::vector<Indicator>& indicators() const { return indicators_; }
    const std::vector<Observation>& observations() const { return observations_; }
    const std::vector<VerticalLandMovement>& vlms() const { return vlms_; }

    const Area* find(AreaId id) const;
    const Publication* find(PublicationId id) const;
    const Indicator* find(IndicatorId id) const;

    /// Area name or publication title. Throws UnknownId.
    std::string get_name(NamedKind kind, std::int64_t id) const;

    /// Ascending observation id; an id that matches nothing yields an empty list.
    std::vector<Observation> observations_by(ObservationFilter filter, std::int64_t id) const;
    std::vector<Observation> observations_in_bbox(const BoundingBox& box) const;

    /// Compares table contents and id counters; indexes are derived state.
    bool operator==(const StoreSnapshot& other) const;

private:
    std::vector<Area> areas_;
    std::vector<Publication> publications_;
    std::vector<Indicator> indicators_;
    std::vector<Observation> observations_;
    std::vector<VerticalLandMovement> vlms_;

    std::int64_t next_area_ = 1;
    std::int64_t next_publication_ = 1;
    std::int64_t next_indicator_ = 1;
    std::int64_t next_observation_ = 1;
    std::int64_t next_vlm_ = 1;

    // Case-folded trimmed name -> id.
    std::unordered_map<std::string, std::int64_t> area_names_;
    std::unordered_map<std::string, std::int64_t> indicator_names_;
    // Foreign id -> positions in observations_, ascending.
    std::unordered_map<std::int64_t, std::vector<std::size_t>> by_area_;
    std::unordered_map<std::int64_t, std::vector<std::size_t>> by_publication_;
    std::unique_ptr<detail::SpatialIndex> spatial_;
};

/// Thread-safe store: one writer at a time, any number of readers. When
/// opened on a file, every successful insert is appended to a journal before
/// it becomes visible; reopening the file replays it.
///
/// Journal layout: the line `SEALEVEL-STORE 1`, then one JSON object per
/// line with a "table" member ("area", "publication", "indicator",
/// "observation", "vlm") and the entity's fields. Ages are stored as integer
/// micro-years.
class Store {
public:
    static constexpr std::string_view kMagic = "SEALEVEL-STORE";
    static constexpr int kFormatVersion = 1;

    Store();
    /// Creates the file if missing. Throws StorageError on an unreadable,
    /// foreign, newer-version or corrupt file.
    explicit Store(std::filesystem::path journal);
    ~Store();

    Store(const Store&) = delete;
    Store& operator=(const Store&) = delete;

    AreaId add_area(std::string_view name);
    PublicationId add_publication(std::string_view title, std::string_view authors, int year);
    IndicatorId add_indicator(std::string_view name);
    ObservationId add_observation(const ObservationPayload& payload);
    VlmId add_vlm(const VlmPayload& payload);

    std::vector<Area> list_areas() const;
    std::vector<Publication> list_publications() const;
    std::vector<Indicator> list_indicators() const;
    std::vector<Observation> list_observations() const;
    std::vector<VerticalLandMovement> list_vlms() const;

    std::string get_name(NamedKind kind, std::int64_t id) const;
    std::vector<Observation> observations_by(ObservationFilter filter, std::int64_t id) const;
    std::vector<Observation> observations_in_bbox(const BoundingBox& box) const;

    /// Runs `fn` against a consistent view while holding the read lock.
    template <typename Fn>
    decltype(auto) read(Fn&& fn) const {
        { std::lock_guard gate(turnstile_); }
        std::shared_lock lock(mutex_);
        return std::forward<Fn>(fn)(static_cast<const StoreSnapshot&>(data_));
    }

    StoreSnapshot snapshot() const;

    const std::optional<std::filesystem::path>& path() const { return path_; }

private:
    template <typename Entity>
    void commit(Entity entity);
    void load();

    // Writers hold the turnstile while they wait, so a steady stream of
    // readers cannot starve them (the platform rwlock prefers readers).
    mutable std::mutex turnstile_;
    mutable std::shared_mutex mutex_;
    StoreSnapshot data_;
    std::optional<std::filesystem::path> path_;
    std::ofstream journal_;
};

}  // namespace sealevel
