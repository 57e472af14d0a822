#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace instrank::corpus {

struct PaperRecord {
    std::string paper_id;
    std::string venue_id;  // conference series id, e.g. "KDD"
    int year = 0;
    bool is_full_paper = false;
};

struct AuthorshipRecord {
    std::string paper_id;
    std::string author_id;
    int position = 1;            // author order on the paper, 1-based
    std::string institution_id;  // empty = unknown affiliation
};

struct YearRange {
    int lo = 0;
    int hi = 0;
    bool contains(int y) const { return y >= lo && y <= hi; }
    bool empty() const { return lo > hi; }
};

// papers.tsv: paper_id\tvenue_id\tyear\tis_full_paper, is_full_paper in {0,1}.
// A single leading header line is skipped when its first field is "paper_id".
std::vector<PaperRecord> parse_papers(std::istream& in);

struct ParsedAuthorships {
    std::vector<AuthorshipRecord> records;
    std::size_t duplicates_collapsed = 0;  // exact duplicate rows dropped
};

// authorships.tsv: paper_id\tauthor_id\tposition\tinstitution_id.
// institution_id may be empty (unknown). Same header rule as parse_papers.
ParsedAuthorships parse_authorships(std::istream& in);

// Immutable indexed view over one corpus. Queries are deterministic: every
// returned list is sorted by id. Safe for concurrent readers.
class CorpusIndex {
  public:
    static CorpusIndex build(std::vector<PaperRecord> papers,
                             std::vector<AuthorshipRecord> authorships);

    std::size_t paper_count() const { return papers_.size(); }
    std::size_t authorship_count() const { return authorships_.size(); }
    bool empty() const { return papers_.empty(); }

    const PaperRecord* find_paper(const std::string& paper_id) const;

    // Authorships of one paper, sorted by (position, author_id, institution_id).
    std::span<const AuthorshipRecord> authorships_of(const std::string& paper_id) const;

    // All papers with venue in venue_set, year in range, and the full-paper
    // flag when full_only. Sorted by paper_id. Unknown venues yield nothing.
    std::vector<std::string> papers_of(const std::vector<std::string>& venue_set,
                                       YearRange range, bool full_only) const;

    const std::vector<std::string>& venues() const { return venue_catalog_; }
    std::vector<std::string> institutions() const;

    // All authorship rows naming this institution, in (paper, position) order.
    std::vector<const AuthorshipRecord*> authorships_at(
        const std::string& institution) const;

    // Distinct authors with >=1 paper (any flag) at venue since cutoff_year.
    std::vector<std::string> authors_at_venue_since(const std::string& venue,
                                                    int cutoff_year) const;
    // Distinct venues where author published since cutoff_year.
    std::vector<std::string> venues_of_author_since(const std::string& author,
                                                    int cutoff_year) const;

    bool has_papers() const { return !papers_.empty(); }
    int min_year() const { return min_year_; }
    int max_year() const { return max_year_; }

    // Test instrumentation: observes every scoped papers_of query. The hook
    // is invoked under a lock so parallel feature passes stay safe.
    using QueryObserver = std::function<void(const std::vector<std::string>& venues,
                                             YearRange range, bool full_only)>;
    void set_query_observer(QueryObserver observer) const;

    // Round-trip serialization of the underlying tables.
    void write_papers_tsv(std::ostream& out) const;
    void write_authorships_tsv(std::ostream& out) const;

    // Index cache with an embedded format-version tag; loading refuses
    // mismatched versions.
    void save_cache(const std::string& path) const;
    static CorpusIndex load_cache(const std::string& path);

    const std::vector<PaperRecord>& papers() const { return papers_; }
    const std::vector<AuthorshipRecord>& authorships() const { return authorships_; }

  private:
    std::vector<PaperRecord> papers_;            // sorted by paper_id
    std::vector<AuthorshipRecord> authorships_;  // grouped by paper, position-sorted
    std::unordered_map<std::string, std::size_t> paper_slot_;
    std::vector<std::pair<std::size_t, std::size_t>> auth_span_;  // per paper
    std::map<std::string, std::map<int, std::vector<std::size_t>>> venue_year_papers_;
    std::map<std::string, std::vector<std::size_t>> author_papers_;
    std::map<std::string, std::vector<std::size_t>> institution_authorships_;
    std::vector<std::string> venue_catalog_;
    int min_year_ = 0;
    int max_year_ = 0;

    struct ObserverSlot {
        std::mutex mutex;
        QueryObserver observer;
    };
    std::unique_ptr<ObserverSlot> observer_slot_ = std::make_unique<ObserverSlot>();

    void notify(const std::vector<std::string>& venues, YearRange range,
                bool full_only) const;
};

}  // namespace instrank::corpus
