#pragma once

#include <memory>
#include <optional>
#include <string>

#include "psychocal/sim.hpp"

namespace psychocal::sim {

// Prompt templates for external backends. Placeholders: the generator
// takes {passage} {question} {ability}; the scorer additionally takes
// {rubric} {response} and conventionally ends with "Score:". When set,
// the rendered prompt rides along in the request body.
struct BackendTemplates {
    std::string generator;
    std::string scorer;

    static BackendTemplates load(const std::string& generator_path,
                                 const std::string& scorer_path);
};

// Line-delimited worker: one JSON request per line on the child's stdin,
// one JSON response per line on its stdout.
//   {"kind":"generate","item":{..},"theta":..,"decoding":{..}}
//   {"kind":"score","item":{..},"text":..}
// ->
//   {"ok":true,"text":..} | {"ok":true,"score":k} | {"ok":false,"error":..}
class SubprocessBackend : public GeneratorBackend, public ScorerBackend {
  public:
    explicit SubprocessBackend(std::string command,
                               std::optional<BackendTemplates> templates = std::nullopt);
    ~SubprocessBackend() override;
    SubprocessBackend(const SubprocessBackend&) = delete;
    SubprocessBackend& operator=(const SubprocessBackend&) = delete;

    std::string generate(const Item& item, double theta, const Decoding& decoding,
                         std::uint64_t cell_seed) override;
    int score(const Item& item, const std::string& response_text,
              std::uint64_t cell_seed) override;

  private:
    struct Child;
    std::string roundtrip(const std::string& request_line);
    void ensure_started();

    std::string command_;
    std::optional<BackendTemplates> templates_;
    std::unique_ptr<Child> child_;
};

// Same bodies over HTTP: POST /generate and POST /score.
class HttpBackend : public GeneratorBackend, public ScorerBackend {
  public:
    explicit HttpBackend(std::string base_url,
                         std::optional<BackendTemplates> templates = std::nullopt);
    ~HttpBackend() override;

    std::string generate(const Item& item, double theta, const Decoding& decoding,
                         std::uint64_t cell_seed) override;
    int score(const Item& item, const std::string& response_text,
              std::uint64_t cell_seed) override;

  private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
    std::optional<BackendTemplates> templates_;
};

}  // namespace psychocal::sim
