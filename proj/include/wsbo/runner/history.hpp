#pragma once

#include <filesystem>
#include <vector>

#include "wsbo/gp.hpp"

namespace wsbo {

/// Evaluations of previously solved tasks, one (task, x, y, noise) record each.
struct History {
  int dim = 0;
  std::vector<Observation> records;

  int max_task() const;
  bool empty() const { return records.empty(); }
};

/// Plain text: header `# d=<dim> m=<max_task>`, then one comma-separated
/// record per line: task_id, x_1..x_d, y, noise_var.
History load_history(const std::filesystem::path& path);
void save_history(const History& history, const std::filesystem::path& path);

/// Concatenates histories, renumbering tasks so that every distinct
/// (file, task id) pair becomes its own task 1, 2, ... in order of appearance.
History merge_histories(const std::vector<History>& histories);

/// Records the current-task observations of a finished run as task `task`.
History history_from_run(const std::vector<Observation>& observations, int dim, int task = 1);

}  // namespace wsbo
