#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>

namespace credaug {

/// Stand-in for the Give Me Some Credit training file when the real one is
/// not available. Same column layout (including the unnamed index column
/// and the columns the default schema ignores), "NA" in MonthlyIncome or
/// NumberOfDependents for the incomplete rows, and label-dependent feature
/// distributions with heavy class overlap.
struct GmscLikeOptions {
  std::size_t complete_rows = 97243;
  std::size_t positives = 6871;  // among the complete rows
  std::size_t incomplete_rows = 2500;
  std::uint64_t seed = 20240101;
};

void write_gmsc_like_csv(const std::filesystem::path& path,
                         const GmscLikeOptions& options = {});

}  // namespace credaug
