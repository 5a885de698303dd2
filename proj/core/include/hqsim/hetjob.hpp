#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "hqsim/types.hpp"

namespace hqsim {

// Parser for the SLURM-like heterogeneous job script dialect:
//
//   #!/bin/bash
//   #SBATCH --partition classical
//   #SBATCH --nodes 10
//   #SBATCH --time=01:00:00
//   #SBATCH hetjob
//   #SBATCH --partition quantum
//   #SBATCH --gres=qpu:1
//   #SBATCH --time=01:00:00
//
//   srun ./hybrid_job
//
// Only the directives above are supported; any other "#SBATCH --..." line is
// an error rather than being silently ignored.

enum class HetjobErrorKind {
    UnknownDirective,
    MalformedTime,
    MalformedGres,
    MalformedNodes,
    MalformedPartition,
    MissingWalltime,
    DuplicateDirective,
    EmptyScript,
};

const char* to_string(HetjobErrorKind kind);

struct HetjobError {
    HetjobErrorKind kind;
    int line = 0; // 1-based source line; component start line for MissingWalltime
    std::string detail;
};

struct HetjobParse {
    std::vector<ResourceRequest> requests;
    std::string command_payload; // non-directive command lines, verbatim
    std::vector<HetjobError> errors;

    bool ok() const { return errors.empty(); }
};

HetjobParse parse_hetjob(std::string_view script);

// Inverse of parse_hetjob for valid request lists (integer-second walltimes).
std::string render_hetjob(const std::vector<ResourceRequest>& requests,
                          std::string_view command_payload = "");

// "<file>:<line>: <error>" one per line
std::string format_errors(const HetjobParse& parse, std::string_view filename);

} // namespace hqsim
