#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <unistd.h>

#include "instrank/corpus.hpp"

namespace testutil {

// Scratch directory under the system temp dir, wiped on entry.
inline std::filesystem::path fresh_dir(const std::string& tag) {
    const auto dir = std::filesystem::temp_directory_path() /
                     ("instrank_test_" + tag + "_" + std::to_string(::getpid()));
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

inline std::string slurp(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

// Index from literal rows: papers as {id, venue, year, full}, authorships as
// {paper, author, position, institution}.
inline instrank::corpus::CorpusIndex make_index(
    std::vector<instrank::corpus::PaperRecord> papers,
    std::vector<instrank::corpus::AuthorshipRecord> authorships) {
    return instrank::corpus::CorpusIndex::build(std::move(papers),
                                                std::move(authorships));
}

}  // namespace testutil
