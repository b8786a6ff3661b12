#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "hsps/config.hpp"

namespace hsps::cli {

struct OutputRecord {
    std::string file;  // relative to the output directory
    std::size_t bytes = 0;
    std::string fnv1a64;
};

/// Serialized file writer for one command; remembers what it wrote for the manifest.
class OutputSink {
public:
    explicit OutputSink(std::filesystem::path dir) : dir_(std::move(dir)) {}

    void write(const std::string& name, std::string_view bytes);
    const std::filesystem::path& dir() const { return dir_; }
    const std::vector<OutputRecord>& records() const { return records_; }

private:
    std::filesystem::path dir_;
    std::vector<OutputRecord> records_;
};

enum class HeraldingSweepKind { wavelength, focal, all };
enum class PolingAction { optimize, evaluate, landscape };
enum class MultiplexAction { model, simulate, fit };

void cmd_jsa(const config::RunConfig& cfg, OutputSink& out);
void cmd_heralding(const config::RunConfig& cfg, HeraldingSweepKind kind, OutputSink& out);
void cmd_purity(const config::RunConfig& cfg, OutputSink& out);
/// `evaluate` reads poling.structure_file.
void cmd_poling(const config::RunConfig& cfg, PolingAction action, OutputSink& out);
/// `fit` reads multiplex.fit.data_file.
void cmd_multiplex(const config::RunConfig& cfg, MultiplexAction action, OutputSink& out);

struct ManifestInfo {
    std::string command;
    std::string started_utc;
    std::string finished_utc;
    int threads = 1;
};

/// Manifest JSON: toolkit version, config hash, timestamps, outputs, resolved config.
std::string manifest_json(const config::RunConfig& cfg, const ManifestInfo& info,
                          const std::vector<OutputRecord>& outputs);

}  // namespace hsps::cli
