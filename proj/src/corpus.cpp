#include "instrank/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>
#include <unordered_set>

#include "instrank/errors.hpp"
#include "instrank/tsv.hpp"

namespace instrank::corpus {

namespace {

constexpr int kMinYear = 1900;
constexpr int kMaxYear = 2100;
constexpr const char* kCacheVersion = "instrank-index-v1";

[[noreturn]] void parse_fail(std::size_t line_no, const std::string& what) {
    throw ParseError("line " + std::to_string(line_no) + ": " + what);
}

// Reads lines, strips a trailing '\r' so CRLF input is tolerated, skips a
// single leading header whose first field matches header_key.
class LineReader {
  public:
    LineReader(std::istream& in, std::string_view header_key)
        : in_(in), header_key_(header_key) {}

    bool next(std::string& line, std::size_t& line_no) {
        while (std::getline(in_, line)) {
            ++count_;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (count_ == 1) {
                auto fields = tsv::split(line);
                if (!fields.empty() && fields[0] == header_key_) continue;
            }
            line_no = count_;
            return true;
        }
        return false;
    }

  private:
    std::istream& in_;
    std::string_view header_key_;
    std::size_t count_ = 0;
};

}  // namespace

std::vector<PaperRecord> parse_papers(std::istream& in) {
    std::vector<PaperRecord> out;
    std::unordered_map<std::string, std::size_t> seen;  // paper_id -> line
    LineReader reader(in, "paper_id");
    std::string line;
    std::size_t line_no = 0;
    while (reader.next(line, line_no)) {
        auto fields = tsv::split(line);
        if (fields.size() != 4)
            parse_fail(line_no, "expected 4 tab-separated fields, got " +
                                    std::to_string(fields.size()));
        if (fields[0].empty()) parse_fail(line_no, "empty paper_id");
        if (fields[1].empty()) parse_fail(line_no, "empty venue_id");
        long long year = 0;
        if (!tsv::parse_int(fields[2], year))
            parse_fail(line_no, "year is not an integer: '" + std::string(fields[2]) + "'");
        if (year < kMinYear || year > kMaxYear)
            parse_fail(line_no, "year " + std::to_string(year) + " outside [" +
                                    std::to_string(kMinYear) + ", " +
                                    std::to_string(kMaxYear) + "]");
        if (fields[3] != "0" && fields[3] != "1")
            parse_fail(line_no, "is_full_paper must be 0 or 1, got '" +
                                    std::string(fields[3]) + "'");

        PaperRecord rec{std::string(fields[0]), std::string(fields[1]),
                        static_cast<int>(year), fields[3] == "1"};
        auto [it, inserted] = seen.emplace(rec.paper_id, line_no);
        if (!inserted)
            throw ValidationError("line " + std::to_string(line_no) +
                                  ": duplicate paper_id '" + rec.paper_id +
                                  "' (first seen on line " +
                                  std::to_string(it->second) + ")");
        out.push_back(std::move(rec));
    }
    return out;
}

ParsedAuthorships parse_authorships(std::istream& in) {
    ParsedAuthorships result;
    // (paper, author) -> position, for the consistent-position invariant.
    std::map<std::pair<std::string, std::string>, int> positions;
    std::set<std::tuple<std::string, std::string, std::string>> triples;
    LineReader reader(in, "paper_id");
    std::string line;
    std::size_t line_no = 0;
    while (reader.next(line, line_no)) {
        auto fields = tsv::split(line);
        if (fields.size() != 4)
            parse_fail(line_no, "expected 4 tab-separated fields, got " +
                                    std::to_string(fields.size()));
        if (fields[0].empty()) parse_fail(line_no, "empty paper_id");
        if (fields[1].empty()) parse_fail(line_no, "empty author_id");
        long long pos = 0;
        if (!tsv::parse_int(fields[2], pos))
            parse_fail(line_no, "position is not an integer: '" + std::string(fields[2]) + "'");
        if (pos < 1)
            throw ValidationError("line " + std::to_string(line_no) +
                                  ": author position must be >= 1, got " +
                                  std::to_string(pos));

        AuthorshipRecord rec{std::string(fields[0]), std::string(fields[1]),
                             static_cast<int>(pos), std::string(fields[3])};

        auto key = std::make_pair(rec.paper_id, rec.author_id);
        auto [it, inserted] = positions.emplace(key, rec.position);
        if (!inserted && it->second != rec.position)
            throw ValidationError("line " + std::to_string(line_no) +
                                  ": conflicting positions for (" + rec.paper_id +
                                  ", " + rec.author_id + "): " +
                                  std::to_string(it->second) + " vs " +
                                  std::to_string(rec.position));

        auto triple = std::make_tuple(rec.paper_id, rec.author_id, rec.institution_id);
        if (!triples.insert(triple).second) {
            ++result.duplicates_collapsed;
            continue;
        }
        result.records.push_back(std::move(rec));
    }
    return result;
}

CorpusIndex CorpusIndex::build(std::vector<PaperRecord> papers,
                               std::vector<AuthorshipRecord> authorships) {
    CorpusIndex idx;

    std::sort(papers.begin(), papers.end(),
              [](const PaperRecord& a, const PaperRecord& b) {
                  return a.paper_id < b.paper_id;
              });
    for (std::size_t i = 0; i < papers.size(); ++i) {
        const PaperRecord& p = papers[i];
        if (p.paper_id.empty()) throw ValidationError("paper with empty paper_id");
        if (p.venue_id.empty())
            throw ValidationError("paper '" + p.paper_id + "' has empty venue_id");
        if (p.year < kMinYear || p.year > kMaxYear)
            throw ValidationError("paper '" + p.paper_id + "' has year " +
                                  std::to_string(p.year) + " outside [" +
                                  std::to_string(kMinYear) + ", " +
                                  std::to_string(kMaxYear) + "]");
        if (i > 0 && papers[i - 1].paper_id == p.paper_id)
            throw ValidationError("duplicate paper_id '" + p.paper_id + "'");
    }

    idx.papers_ = std::move(papers);
    idx.paper_slot_.reserve(idx.papers_.size());
    for (std::size_t i = 0; i < idx.papers_.size(); ++i)
        idx.paper_slot_.emplace(idx.papers_[i].paper_id, i);

    // Validate authorships, drop exact duplicates, group by paper.
    std::map<std::pair<std::string, std::string>, int> positions;
    std::vector<std::vector<AuthorshipRecord>> per_paper(idx.papers_.size());
    for (AuthorshipRecord& a : authorships) {
        auto slot = idx.paper_slot_.find(a.paper_id);
        if (slot == idx.paper_slot_.end())
            throw ValidationError("authorship references unknown paper_id '" +
                                  a.paper_id + "'");
        if (a.author_id.empty())
            throw ValidationError("authorship of paper '" + a.paper_id +
                                  "' has empty author_id");
        if (a.position < 1)
            throw ValidationError("authorship (" + a.paper_id + ", " + a.author_id +
                                  ") has position " + std::to_string(a.position));
        auto key = std::make_pair(a.paper_id, a.author_id);
        auto [it, inserted] = positions.emplace(key, a.position);
        if (!inserted && it->second != a.position)
            throw ValidationError("conflicting positions for (" + a.paper_id + ", " +
                                  a.author_id + ")");
        per_paper[slot->second].push_back(std::move(a));
    }

    idx.auth_span_.resize(idx.papers_.size());
    for (std::size_t i = 0; i < per_paper.size(); ++i) {
        auto& group = per_paper[i];
        std::sort(group.begin(), group.end(),
                  [](const AuthorshipRecord& a, const AuthorshipRecord& b) {
                      return std::tie(a.position, a.author_id, a.institution_id) <
                             std::tie(b.position, b.author_id, b.institution_id);
                  });
        group.erase(std::unique(group.begin(), group.end(),
                                [](const AuthorshipRecord& a, const AuthorshipRecord& b) {
                                    return a.author_id == b.author_id &&
                                           a.institution_id == b.institution_id;
                                }),
                    group.end());
        std::size_t begin = idx.authorships_.size();
        for (auto& rec : group) idx.authorships_.push_back(std::move(rec));
        idx.auth_span_[i] = {begin, idx.authorships_.size()};
    }

    // Secondary indexes.
    std::set<std::string> venues;
    bool first = true;
    for (std::size_t i = 0; i < idx.papers_.size(); ++i) {
        const PaperRecord& p = idx.papers_[i];
        venues.insert(p.venue_id);
        idx.venue_year_papers_[p.venue_id][p.year].push_back(i);
        if (first || p.year < idx.min_year_) idx.min_year_ = p.year;
        if (first || p.year > idx.max_year_) idx.max_year_ = p.year;
        first = false;
    }
    idx.venue_catalog_.assign(venues.begin(), venues.end());

    for (std::size_t i = 0; i < idx.papers_.size(); ++i) {
        auto [b, e] = idx.auth_span_[i];
        std::string last;
        for (std::size_t j = b; j < e; ++j) {
            if (idx.authorships_[j].author_id != last) {
                idx.author_papers_[idx.authorships_[j].author_id].push_back(i);
                last = idx.authorships_[j].author_id;
            }
        }
    }
    for (auto& [author, list] : idx.author_papers_) {
        std::sort(list.begin(), list.end());
        list.erase(std::unique(list.begin(), list.end()), list.end());
    }

    for (std::size_t j = 0; j < idx.authorships_.size(); ++j)
        if (!idx.authorships_[j].institution_id.empty())
            idx.institution_authorships_[idx.authorships_[j].institution_id].push_back(j);

    return idx;
}

const PaperRecord* CorpusIndex::find_paper(const std::string& paper_id) const {
    auto it = paper_slot_.find(paper_id);
    return it == paper_slot_.end() ? nullptr : &papers_[it->second];
}

std::span<const AuthorshipRecord> CorpusIndex::authorships_of(
    const std::string& paper_id) const {
    auto it = paper_slot_.find(paper_id);
    if (it == paper_slot_.end()) return {};
    auto [b, e] = auth_span_[it->second];
    return {authorships_.data() + b, e - b};
}

std::vector<std::string> CorpusIndex::papers_of(
    const std::vector<std::string>& venue_set, YearRange range,
    bool full_only) const {
    notify(venue_set, range, full_only);
    std::vector<std::size_t> slots;
    for (const std::string& venue : venue_set) {
        auto vit = venue_year_papers_.find(venue);
        if (vit == venue_year_papers_.end()) continue;
        auto lo = vit->second.lower_bound(range.lo);
        auto hi = vit->second.upper_bound(range.hi);
        for (auto it = lo; it != hi; ++it)
            for (std::size_t slot : it->second)
                if (!full_only || papers_[slot].is_full_paper) slots.push_back(slot);
    }
    std::sort(slots.begin(), slots.end());
    slots.erase(std::unique(slots.begin(), slots.end()), slots.end());
    std::vector<std::string> ids;
    ids.reserve(slots.size());
    for (std::size_t slot : slots) ids.push_back(papers_[slot].paper_id);
    return ids;  // papers_ is sorted by id, so slot order == id order
}

std::vector<std::string> CorpusIndex::institutions() const {
    std::vector<std::string> insts;
    insts.reserve(institution_authorships_.size());
    for (const auto& [inst, _] : institution_authorships_) insts.push_back(inst);
    return insts;
}

std::vector<const AuthorshipRecord*> CorpusIndex::authorships_at(
    const std::string& institution) const {
    std::vector<const AuthorshipRecord*> rows;
    auto it = institution_authorships_.find(institution);
    if (it == institution_authorships_.end()) return rows;
    rows.reserve(it->second.size());
    for (std::size_t j : it->second) rows.push_back(&authorships_[j]);
    return rows;
}

std::vector<std::string> CorpusIndex::authors_at_venue_since(
    const std::string& venue, int cutoff_year) const {
    std::set<std::string> authors;
    auto vit = venue_year_papers_.find(venue);
    if (vit == venue_year_papers_.end()) return {};
    for (auto it = vit->second.lower_bound(cutoff_year); it != vit->second.end(); ++it)
        for (std::size_t slot : it->second) {
            auto [b, e] = auth_span_[slot];
            for (std::size_t j = b; j < e; ++j)
                authors.insert(authorships_[j].author_id);
        }
    return {authors.begin(), authors.end()};
}

std::vector<std::string> CorpusIndex::venues_of_author_since(
    const std::string& author, int cutoff_year) const {
    std::set<std::string> venues;
    auto ait = author_papers_.find(author);
    if (ait == author_papers_.end()) return {};
    for (std::size_t slot : ait->second)
        if (papers_[slot].year >= cutoff_year) venues.insert(papers_[slot].venue_id);
    return {venues.begin(), venues.end()};
}

void CorpusIndex::set_query_observer(QueryObserver observer) const {
    std::lock_guard<std::mutex> lock(observer_slot_->mutex);
    observer_slot_->observer = std::move(observer);
}

void CorpusIndex::notify(const std::vector<std::string>& venues, YearRange range,
                         bool full_only) const {
    std::lock_guard<std::mutex> lock(observer_slot_->mutex);
    if (observer_slot_->observer) observer_slot_->observer(venues, range, full_only);
}

void CorpusIndex::write_papers_tsv(std::ostream& out) const {
    out << "paper_id\tvenue_id\tyear\tis_full_paper\n";
    for (const PaperRecord& p : papers_)
        out << p.paper_id << '\t' << p.venue_id << '\t' << p.year << '\t'
            << (p.is_full_paper ? '1' : '0') << '\n';
}

void CorpusIndex::write_authorships_tsv(std::ostream& out) const {
    out << "paper_id\tauthor_id\tposition\tinstitution_id\n";
    for (const AuthorshipRecord& a : authorships_)
        out << a.paper_id << '\t' << a.author_id << '\t' << a.position << '\t'
            << a.institution_id << '\n';
}

void CorpusIndex::save_cache(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << kCacheVersion << '\n';
    out << "papers\t" << papers_.size() << '\n';
    for (const PaperRecord& p : papers_)
        out << p.paper_id << '\t' << p.venue_id << '\t' << p.year << '\t'
            << (p.is_full_paper ? '1' : '0') << '\n';
    out << "authorships\t" << authorships_.size() << '\n';
    for (const AuthorshipRecord& a : authorships_)
        out << a.paper_id << '\t' << a.author_id << '\t' << a.position << '\t'
            << a.institution_id << '\n';
    if (!out) throw IoError("failed writing cache '" + path + "'");
}

CorpusIndex CorpusIndex::load_cache(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open cache '" + path + "'");
    std::string line;
    if (!std::getline(in, line)) throw ParseError("cache '" + path + "' is empty");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kCacheVersion)
        throw ParseError("cache '" + path + "': version tag '" + line +
                         "' does not match expected '" + kCacheVersion + "'");

    auto read_count = [&](const char* section) -> std::size_t {
        if (!std::getline(in, line))
            throw ParseError("cache '" + path + "': missing " + std::string(section) +
                             " section");
        if (!line.empty() && line.back() == '\r') line.pop_back();
        auto fields = tsv::split(line);
        long long n = 0;
        if (fields.size() != 2 || fields[0] != section || !tsv::parse_int(fields[1], n) ||
            n < 0)
            throw ParseError("cache '" + path + "': malformed " + std::string(section) +
                             " header");
        return static_cast<std::size_t>(n);
    };

    std::size_t n_papers = read_count("papers");
    std::vector<PaperRecord> papers;
    papers.reserve(n_papers);
    for (std::size_t i = 0; i < n_papers; ++i) {
        if (!std::getline(in, line))
            throw ParseError("cache '" + path + "': truncated papers section");
        if (!line.empty() && line.back() == '\r') line.pop_back();
        auto fields = tsv::split(line);
        long long year = 0;
        if (fields.size() != 4 || !tsv::parse_int(fields[2], year) ||
            (fields[3] != "0" && fields[3] != "1"))
            throw ParseError("cache '" + path + "': malformed paper row");
        papers.push_back({std::string(fields[0]), std::string(fields[1]),
                          static_cast<int>(year), fields[3] == "1"});
    }

    std::size_t n_auth = read_count("authorships");
    std::vector<AuthorshipRecord> auths;
    auths.reserve(n_auth);
    for (std::size_t i = 0; i < n_auth; ++i) {
        if (!std::getline(in, line))
            throw ParseError("cache '" + path + "': truncated authorships section");
        if (!line.empty() && line.back() == '\r') line.pop_back();
        auto fields = tsv::split(line);
        long long pos = 0;
        if (fields.size() != 4 || !tsv::parse_int(fields[2], pos))
            throw ParseError("cache '" + path + "': malformed authorship row");
        auths.push_back({std::string(fields[0]), std::string(fields[1]),
                         static_cast<int>(pos), std::string(fields[3])});
    }

    return build(std::move(papers), std::move(auths));
}

}  // namespace instrank::corpus
