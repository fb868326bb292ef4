#include "sealevel/store.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <mutex>
#include <sstream>

#include <boost/geometry.hpp>
#include <boost/geometry/index/rtree.hpp>
#include <nlohmann/json.hpp>

namespace sealevel {

namespace bg = boost::geometry;
namespace bgi = boost::geometry::index;

namespace detail {

using Point = bg::model::point<double, 2, bg::cs::cartesian>;
using Box = bg::model::box<Point>;
using Entry = std::pair<Point, std::size_t>;

struct SpatialIndex {
    bgi::rtree<Entry, bgi::rstar<16>> tree;
};

}  // namespace detail

namespace {

using nlohmann::json;

std::string fold(const std::string& name) {
    std::string out = name;
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) {
        return static_cast<char>(std::tolower(c));
    });
    return out;
}

template <typename Entity, typename IdT>
const Entity* find_by_id(const std::vector<Entity>& rows, IdT id) {
    auto it = std::lower_bound(rows.begin(), rows.end(), id,
                               [](const Entity& e, IdT v) { return e.id < v; });
    return it != rows.end() && it->id == id ? &*it : nullptr;
}

void require_next(std::int64_t got, std::int64_t expected, std::string_view table) {
    if (got != expected) {
        throw std::logic_error("out-of-order " + std::string(table) + " id " +
                               std::to_string(got) + ", expected " + std::to_string(expected));
    }
}

// Journal records.

json age_record(const Age& age) {
    if (const auto* a = std::get_if<AbsoluteAge>(&age)) {
        return {{"kind", "absolute"}, {"value", a->value.ticks()}};
    }
    const auto& r = std::get<RelativeAge>(age);
    return {{"kind", "relative"}, {"lower", r.lower().ticks()}, {"upper", r.upper().ticks()}};
}

Age age_from_record(const json& j) {
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "absolute") {
        return AbsoluteAge{CalendarYear::from_ticks(j.at("value").get<std::int64_t>())};
    }
    if (kind == "relative") {
        return RelativeAge::make(CalendarYear::from_ticks(j.at("lower").get<std::int64_t>()),
                                 CalendarYear::from_ticks(j.at("upper").get<std::int64_t>()));
    }
    throw std::runtime_error("unknown age kind '" + kind + "'");
}

json record(const Area& a) {
    return {{"table", "area"}, {"id", a.id.value}, {"name", a.name}};
}

json record(const Indicator& i) {
    return {{"table", "indicator"}, {"id", i.id.value}, {"name", i.name}};
}

json record(const Publication& p) {
    return {{"table", "publication"}, {"id", p.id.value}, {"title", p.title},
            {"authors", p.authors}, {"year", p.year}};
}

json record(const Observation& o) {
    return {{"table", "observation"},
            {"id", o.id.value},
            {"lat", o.location.latitude},
            {"lon", o.location.longitude},
            {"height", o.height},
            {"error", o.error},
            {"area_id", o.area_id.value},
            {"publication_id", o.publication_id.value},
            {"indicator_id", o.indicator_id.value},
            {"age", age_record(o.age)}};
}

json record(const VerticalLandMovement& v) {
    return {{"table", "vlm"},
            {"id", v.id.value},
            {"lat", v.location.latitude},
            {"lon", v.location.longitude},
            {"age_start", v.age_start.ticks()},
            {"age_end", v.age_end.ticks()},
            {"velocity", v.velocity},
            {"area_id", v.area_id.value}};
}

template <typename Entity>
void replay_checked(StoreSnapshot& data, Entity prepared, std::int64_t recorded_id) {
    if (prepared.id.value != recorded_id) {
        throw std::runtime_error("id " + std::to_string(recorded_id) + " out of sequence");
    }
    data.insert(std::move(prepared));
}

void replay(StoreSnapshot& data, const json& j) {
    const auto table = j.at("table").get<std::string>();
    const auto id = j.at("id").get<std::int64_t>();
    if (table == "area") {
        replay_checked(data, data.prepare_area(j.at("name").get<std::string>()), id);
    } else if (table == "indicator") {
        replay_checked(data, data.prepare_indicator(j.at("name").get<std::string>()), id);
    } else if (table == "publication") {
        replay_checked(data,
                       data.prepare_publication(j.at("title").get<std::string>(),
                                                j.at("authors").get<std::string>(),
                                                j.at("year").get<int>()),
                       id);
    } else if (table == "observation") {
        ObservationPayload p;
        p.location = GeoPoint{j.at("lat").get<double>(), j.at("lon").get<double>()};
        p.height = j.at("height").get<double>();
        p.error = j.at("error").get<double>();
        p.area_id = AreaId{j.at("area_id").get<std::int64_t>()};
        p.publication_id = PublicationId{j.at("publication_id").get<std::int64_t>()};
        p.indicator_id = IndicatorId{j.at("indicator_id").get<std::int64_t>()};
        p.age = age_from_record(j.at("age"));
        replay_checked(data, data.prepare_observation(p), id);
    } else if (table == "vlm") {
        VlmPayload p;
        p.location = GeoPoint{j.at("lat").get<double>(), j.at("lon").get<double>()};
        p.age_start = CalendarYear::from_ticks(j.at("age_start").get<std::int64_t>());
        p.age_end = CalendarYear::from_ticks(j.at("age_end").get<std::int64_t>());
        p.velocity = j.at("velocity").get<double>();
        p.area_id = AreaId{j.at("area_id").get<std::int64_t>()};
        replay_checked(data, data.prepare_vlm(p), id);
    } else {
        throw std::runtime_error("unknown table '" + table + "'");
    }
}

}  // namespace

// BoundingBox

BoundingBox BoundingBox::make(double min_lat, double max_lat, double min_lon, double max_lon) {
    validate_geopoint(min_lat, min_lon);
    validate_geopoint(max_lat, max_lon);
    if (min_lat > max_lat) {
        throw DataError(Errc::InvertedInterval, "min_lat", "min_lat must not exceed max_lat");
    }
    if (min_lon > max_lon) {
        throw DataError(Errc::InvertedInterval, "min_lon", "min_lon must not exceed max_lon");
    }
    return BoundingBox(min_lat, max_lat, min_lon, max_lon);
}

// StoreSnapshot

StoreSnapshot::StoreSnapshot() : spatial_(std::make_unique<detail::SpatialIndex>()) {}

StoreSnapshot::StoreSnapshot(const StoreSnapshot& other)
    : areas_(other.areas_),
      publications_(other.publications_),
      indicators_(other.indicators_),
      observations_(other.observations_),
      vlms_(other.vlms_),
      next_area_(other.next_area_),
      next_publication_(other.next_publication_),
      next_indicator_(other.next_indicator_),
      next_observation_(other.next_observation_),
      next_vlm_(other.next_vlm_),
      area_names_(other.area_names_),
      indicator_names_(other.indicator_names_),
      by_area_(other.by_area_),
      by_publication_(other.by_publication_),
      spatial_(std::make_unique<detail::SpatialIndex>(*other.spatial_)) {}

StoreSnapshot& StoreSnapshot::operator=(const StoreSnapshot& other) {
    if (this != &other) {
        StoreSnapshot copy(other);
        *this = std::move(copy);
    }
    return *this;
}

StoreSnapshot::StoreSnapshot(StoreSnapshot&&) noexcept = default;
StoreSnapshot& StoreSnapshot::operator=(StoreSnapshot&&) noexcept = default;
StoreSnapshot::~StoreSnapshot() = default;

Area StoreSnapshot::prepare_area(std::string_view name) const {
    auto trimmed = normalize_name(name);
    if (area_names_.count(fold(trimmed)) != 0) {
        throw DataError(Errc::DuplicateName, "name", "area '" + trimmed + "' already exists");
    }
    return Area{AreaId{next_area_}, std::move(trimmed)};
}

Publication StoreSnapshot::prepare_publication(std::string_view title, std::string_view authors,
                                               int year) const {
    Publication p;
    p.title = normalize_name(title, "title");
    p.authors = normalize_name(authors, "authors");
    validate_publication_year(year);
    p.year = year;
    p.id = PublicationId{next_publication_};
    return p;
}

Indicator StoreSnapshot::prepare_indicator(std::string_view name) const {
    auto trimmed = normalize_name(name);
    if (indicator_names_.count(fold(trimmed)) != 0) {
        throw DataError(Errc::DuplicateName, "name",
                        "indicator '" + trimmed + "' already exists");
    }
    return Indicator{IndicatorId{next_indicator_}, std::move(trimmed)};
}

Observation StoreSnapshot::prepare_observation(const ObservationPayload& payload) const {
    validate_geopoint(payload.location.latitude, payload.location.longitude);
    if (!std::isfinite(payload.height)) {
        throw DataError(Errc::NonFiniteField, "height", "height must be finite");
    }
    if (!std::isfinite(payload.error)) {
        throw DataError(Errc::NonFiniteField, "error", "error must be finite");
    }
    if (payload.error < 0.0) {
        throw DataError(Errc::NegativeError, "error", "error must not be negative");
    }
    if (!find(payload.area_id)) {
        throw DataError(Errc::UnknownArea, "area_id",
                        "no area with id " + std::to_string(payload.area_id.value));
    }
    if (!find(payload.publication_id)) {
        throw DataError(Errc::UnknownPublication, "publication_id",
                        "no publication with id " + std::to_string(payload.publication_id.value));
    }
    if (!find(payload.indicator_id)) {
        throw DataError(Errc::UnknownIndicator, "indicator_id",
                        "no indicator with id " + std::to_string(payload.indicator_id.value));
    }
    Observation o;
    o.id = ObservationId{next_observation_};
    o.location = payload.location;
    o.height = payload.height;
    o.error = payload.error;
    o.area_id = payload.area_id;
    o.publication_id = payload.publication_id;
    o.indicator_id = payload.indicator_id;
    o.age = payload.age;
    return o;
}

VerticalLandMovement StoreSnapshot::prepare_vlm(const VlmPayload& payload) const {
    validate_geopoint(payload.location.latitude, payload.location.longitude);
    if (payload.age_start > payload.age_end) {
        throw DataError(Errc::InvertedInterval, "age_start",
                        "age_start must not be after age_end");
    }
    if (!std::isfinite(payload.velocity)) {
        throw DataError(Errc::NonFiniteField, "velocity", "velocity must be finite");
    }
    if (!find(payload.area_id)) {
        throw DataError(Errc::UnknownArea, "area_id",
                        "no area with id " + std::to_string(payload.area_id.value));
    }
    return VerticalLandMovement{VlmId{next_vlm_}, payload.location, payload.age_start,
                                payload.age_end,  payload.velocity, payload.area_id};
}

void StoreSnapshot::insert(Area area) {
    require_next(area.id.value, next_area_, "area");
    area_names_.emplace(fold(area.name), area.id.value);
    areas_.push_back(std::move(area));
    ++next_area_;
}

void StoreSnapshot::insert(Publication publication) {
    require_next(publication.id.value, next_publication_, "publication");
    publications_.push_back(std::move(publication));
    ++next_publication_;
}

void StoreSnapshot::insert(Indicator indicator) {
    require_next(indicator.id.value, next_indicator_, "indicator");
    indicator_names_.emplace(fold(indicator.name), indicator.id.value);
    indicators_.push_back(std::move(indicator));
    ++next_indicator_;
}

void StoreSnapshot::insert(Observation observation) {
    require_next(observation.id.value, next_observation_, "observation");
    const auto pos = observations_.size();
    by_area_[observation.area_id.value].push_back(pos);
    by_publication_[observation.publication_id.value].push_back(pos);
    spatial_->tree.insert(
        {detail::Point(observation.location.latitude, observation.location.longitude), pos});
    observations_.push_back(std::move(observation));
    ++next_observation_;
}

void StoreSnapshot::insert(VerticalLandMovement vlm) {
    require_next(vlm.id.value, next_vlm_, "vlm");
    vlms_.push_back(std::move(vlm));
    ++next_vlm_;
}

AreaId StoreSnapshot::add_area(std::string_view name) {
    auto a = prepare_area(name);
    const auto id = a.id;
    insert(std::move(a));
    return id;
}

PublicationId StoreSnapshot::add_publication(std::string_view title, std::string_view authors,
                                             int year) {
    auto p = prepare_publication(title, authors, year);
    const auto id = p.id;
    insert(std::move(p));
    return id;
}

IndicatorId StoreSnapshot::add_indicator(std::string_view name) {
    auto i = prepare_indicator(name);
    const auto id = i.id;
    insert(std::move(i));
    return id;
}

ObservationId StoreSnapshot::add_observation(const ObservationPayload& payload) {
    auto o = prepare_observation(payload);
    const auto id = o.id;
    insert(std::move(o));
    return id;
}

VlmId StoreSnapshot::add_vlm(const VlmPayload& payload) {
    auto v = prepare_vlm(payload);
    const auto id = v.id;
    insert(std::move(v));
    return id;
}

const Area* StoreSnapshot::find(AreaId id) const { return find_by_id(areas_, id); }
const Publication* StoreSnapshot::find(PublicationId id) const {
    return find_by_id(publications_, id);
}
const Indicator* StoreSnapshot::find(IndicatorId id) const { return find_by_id(indicators_, id); }

std::string StoreSnapshot::get_name(NamedKind kind, std::int64_t id) const {
    if (kind == NamedKind::Area) {
        if (const auto* a = find(AreaId{id})) return a->name;
        throw DataError(Errc::UnknownId, "id", "no area with id " + std::to_string(id));
    }
    if (const auto* p = find(PublicationId{id})) return p->title;
    throw DataError(Errc::UnknownId, "id", "no publication with id " + std::to_string(id));
}

std::vector<Observation> StoreSnapshot::observations_by(ObservationFilter filter,
                                                        std::int64_t id) const {
    const auto& index = filter == ObservationFilter::Area ? by_area_ : by_publication_;
    std::vector<Observation> out;
    auto it = index.find(id);
    if (it == index.end()) return out;
    out.reserve(it->second.size());
    for (auto pos : it->second) out.push_back(observations_[pos]);
    return out;
}

std::vector<Observation> StoreSnapshot::observations_in_bbox(const BoundingBox& box) const {
    const detail::Box query(detail::Point(box.min_lat(), box.min_lon()),
                            detail::Point(box.max_lat(), box.max_lon()));
    std::vector<detail::Entry> hits;
    spatial_->tree.query(bgi::covered_by(query), std::back_inserter(hits));
    std::vector<std::size_t> positions;
    positions.reserve(hits.size());
    for (const auto& h : hits) positions.push_back(h.second);
    std::sort(positions.begin(), positions.end());

    std::vector<Observation> out;
    out.reserve(positions.size());
    for (auto pos : positions) out.push_back(observations_[pos]);
    return out;
}

bool StoreSnapshot::operator==(const StoreSnapshot& other) const {
    return areas_ == other.areas_ && publications_ == other.publications_ &&
           indicators_ == other.indicators_ && observations_ == other.observations_ &&
           vlms_ == other.vlms_ && next_area_ == other.next_area_ &&
           next_publication_ == other.next_publication_ &&
           next_indicator_ == other.next_indicator_ &&
           next_observation_ == other.next_observation_ && next_vlm_ == other.next_vlm_;
}

// Store

Store::Store() = default;

Store::Store(std::filesystem::path journal) : path_(std::move(journal)) { load(); }

Store::~Store() = default;

void Store::load() {
    const auto& file = *path_;
    const std::string header = std::string(kMagic) + " " + std::to_string(kFormatVersion);

    std::error_code ec;
    const bool exists = std::filesystem::exists(file, ec);
    std::uintmax_t keep = 0;

    if (exists && std::filesystem::file_size(file, ec) > 0) {
        std::ifstream in(file, std::ios::binary);
        if (!in) throw StorageError("cannot read store file " + file.string());
        std::stringstream buf;
        buf << in.rdbuf();
        const std::string content = buf.str();

        const auto first_nl = content.find('\n');
        const std::string first = content.substr(0, first_nl);
        if (first.rfind(std::string(kMagic) + " ", 0) != 0) {
            throw StorageError(file.string() + " is not a sealevel store file");
        }
        if (first != header) {
            throw StorageError(file.string() + ": unsupported store format '" + first +
                               "', this build reads version " +
                               std::to_string(kFormatVersion));
        }
        if (first_nl == std::string::npos) {
            throw StorageError(file.string() + ": truncated header");
        }

        std::size_t pos = first_nl + 1;
        std::size_t line_no = 1;
        while (pos < content.size()) {
            const auto nl = content.find('\n', pos);
            // A final line without its newline is an interrupted append; drop it.
            if (nl == std::string::npos) break;
            ++line_no;
            const std::string_view line(content.data() + pos, nl - pos);
            try {
                replay(data_, json::parse(line));
            } catch (const std::exception& e) {
                throw StorageError(file.string() + ":" + std::to_string(line_no) +
                                   ": corrupt record: " + e.what());
            }
            pos = nl + 1;
        }
        keep = pos;
        if (keep < content.size()) std::filesystem::resize_file(file, keep);
    } else {
        std::ofstream out(file, std::ios::binary | std::ios::trunc);
        out << header << '\n';
        out.flush();
        if (!out) throw StorageError("cannot create store file " + file.string());
    }

    journal_.open(file, std::ios::binary | std::ios::app);
    if (!journal_) throw StorageError("cannot open store file " + file.string() + " for append");
}

template <typename Entity>
void Store::commit(Entity entity) {
    if (path_) {
        journal_ << record(entity).dump() << '\n';
        journal_.flush();
        if (!journal_) {
            journal_.clear();
            throw StorageError("failed to append to " + path_->string());
        }
    }
    data_.insert(std::move(entity));
}

AreaId Store::add_area(std::string_view name) {
    std::lock_guard gate(turnstile_);
    std::unique_lock lock(mutex_);
    auto a = data_.prepare_area(name);
    const auto id = a.id;
    commit(std::move(a));
    return id;
}

PublicationId Store::add_publication(std::string_view title, std::string_view authors, int year) {
    std::lock_guard gate(turnstile_);
    std::unique_lock lock(mutex_);
    auto p = data_.prepare_publication(title, authors, year);
    const auto id = p.id;
    commit(std::move(p));
    return id;
}

IndicatorId Store::add_indicator(std::string_view name) {
    std::lock_guard gate(turnstile_);
    std::unique_lock lock(mutex_);
    auto i = data_.prepare_indicator(name);
    const auto id = i.id;
    commit(std::move(i));
    return id;
}

ObservationId Store::add_observation(const ObservationPayload& payload) {
    std::lock_guard gate(turnstile_);
    std::unique_lock lock(mutex_);
    auto o = data_.prepare_observation(payload);
    const auto id = o.id;
    commit(std::move(o));
    return id;
}

VlmId Store::add_vlm(const VlmPayload& payload) {
    std::lock_guard gate(turnstile_);
    std::unique_lock lock(mutex_);
    auto v = data_.prepare_vlm(payload);
    const auto id = v.id;
    commit(std::move(v));
    return id;
}

std::vector<Area> Store::list_areas() const {
    return read([](const StoreSnapshot& s) { return s.areas(); });
}
std::vector<Publication> Store::list_publications() const {
    return read([](const StoreSnapshot& s) { return s.publications(); });
}
std::vector<Indicator> Store::list_indicators() const {
    return read([](const StoreSnapshot& s) { return s.indicators(); });
}
std::vector<Observation> Store::list_observations() const {
    return read([](const StoreSnapshot& s) { return s.observations(); });
}
std::vector<VerticalLandMovement> Store::list_vlms() const {
    return read([](const StoreSnapshot& s) { return s.vlms(); });
}

std::string Store::get_name(NamedKind kind, std::int64_t id) const {
    return read([&](const StoreSnapshot& s) { return s.get_name(kind, id); });
}

std::vector<Observation> Store::observations_by(ObservationFilter filter, std::int64_t id) const {
    return read([&](const StoreSnapshot& s) { return s.observations_by(filter, id); });
}

std::vector<Observation> Store::observations_in_bbox(const BoundingBox& box) const {
    return read([&](const StoreSnapshot& s) { return s.observations_in_bbox(box); });
}

StoreSnapshot Store::snapshot() const {
    return read([](const StoreSnapshot& s) { return StoreSnapshot(s); });
}

}  // namespace sealevel
