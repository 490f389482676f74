#pragma once

#include <algorithm>
#include <map>
#include <string>
#include <vector>

#include "apc/records.hpp"

namespace apc {

struct SplitResult {
  std::vector<ExampleRecord> dev;
  std::vector<ExampleRecord> test;
  std::vector<ExampleRecord> validation;
};

// Partitions examples into development/test/validation without ever
// separating a URL group. Groups are placed largest-first into the split
// with the largest remaining deficit, so the requested sizes are met as
// closely as URL granularity allows. Examples without a URL form singleton
// groups. Output is sorted by id within each split.
inline SplitResult split_by_url(const std::vector<ExampleRecord>& examples,
                                std::size_t dev_size, std::size_t test_size) {
  std::map<std::string, std::vector<const ExampleRecord*>> groups;
  for (const ExampleRecord& r : examples) {
    std::string key = r.url.empty() ? "\x01id:" + r.id : r.url;
    groups[key].push_back(&r);
  }
  std::vector<std::pair<std::string, std::vector<const ExampleRecord*>>>
      ordered(groups.begin(), groups.end());
  std::stable_sort(ordered.begin(), ordered.end(),
                   [](const auto& a, const auto& b) {
                     if (a.second.size() != b.second.size()) {
                       return a.second.size() > b.second.size();
                     }
                     return a.first < b.first;
                   });

  long long want[3] = {
      static_cast<long long>(dev_size), static_cast<long long>(test_size),
      static_cast<long long>(examples.size()) -
          static_cast<long long>(dev_size) -
          static_cast<long long>(test_size)};
  if (want[2] < 0) want[2] = 0;
  long long assigned[3] = {0, 0, 0};

  SplitResult out;
  std::vector<ExampleRecord>* splits[3] = {&out.dev, &out.test,
                                           &out.validation};
  for (const auto& [key, members] : ordered) {
    int best = 0;
    long long best_deficit = want[0] - assigned[0];
    for (int s = 1; s < 3; ++s) {
      long long deficit = want[s] - assigned[s];
      if (deficit > best_deficit) {
        best = s;
        best_deficit = deficit;
      }
    }
    for (const ExampleRecord* r : members) splits[best]->push_back(*r);
    assigned[best] += static_cast<long long>(members.size());
  }
  for (auto* split : splits) {
    std::sort(split->begin(), split->end(),
              [](const ExampleRecord& a, const ExampleRecord& b) {
                return a.id < b.id;
              });
  }
  return out;
}

}  // namespace apc
