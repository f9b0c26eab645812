#include "psychocal/backend_client.hpp"

#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>
#include <fstream>

#include <httplib.h>
#include <json.hpp>

namespace psychocal::sim {
namespace {

using nlohmann::json;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open template file: " + path);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void replace_all(std::string& s, const std::string& key, const std::string& value) {
    std::size_t pos = 0;
    while ((pos = s.find(key, pos)) != std::string::npos) {
        s.replace(pos, key.size(), value);
        pos += value.size();
    }
}

std::string render_generator(const std::string& tmpl, const Item& item, double theta) {
    char ability[32];
    std::snprintf(ability, sizeof(ability), "%.4f", theta);
    std::string out = tmpl;
    replace_all(out, "{passage}", item.passage);
    replace_all(out, "{question}", item.question);
    replace_all(out, "{ability}", ability);
    return out;
}

std::string render_scorer(const std::string& tmpl, const Item& item, const std::string& response) {
    std::string out = tmpl;
    replace_all(out, "{rubric}", item.rubric);
    replace_all(out, "{passage}", item.passage);
    replace_all(out, "{question}", item.question);
    replace_all(out, "{response}", response);
    return out;
}

json item_body(const Item& item) {
    return json{{"item_id", item.item_id},
                {"passage", item.passage},
                {"question", item.question},
                {"rubric", item.rubric},
                {"num_categories", item.num_categories}};
}

json generate_body(const Item& item, double theta, const Decoding& d,
                   const std::optional<BackendTemplates>& templates) {
    json body{{"kind", "generate"},
              {"item", item_body(item)},
              {"theta", theta},
              {"decoding",
               {{"max_tokens", d.max_tokens}, {"temperature", d.temperature}, {"top_p", d.top_p}}}};
    if (templates) body["prompt"] = render_generator(templates->generator, item, theta);
    return body;
}

json score_body(const Item& item, const std::string& text,
                const std::optional<BackendTemplates>& templates) {
    json body{{"kind", "score"}, {"item", item_body(item)}, {"text", text}};
    if (templates) body["prompt"] = render_scorer(templates->scorer, item, text);
    return body;
}

std::string expect_text(const std::string& raw) {
    json reply;
    try {
        reply = json::parse(raw);
    } catch (const json::exception&) {
        throw BackendError("backend returned invalid JSON: " + raw);
    }
    if (!reply.value("ok", false))
        throw BackendError("backend error: " + reply.value("error", std::string("unknown")));
    if (!reply.contains("text")) throw BackendError("backend reply missing 'text'");
    return reply.at("text").get<std::string>();
}

int expect_score(const std::string& raw) {
    json reply;
    try {
        reply = json::parse(raw);
    } catch (const json::exception&) {
        throw BackendError("backend returned invalid JSON: " + raw);
    }
    if (!reply.value("ok", false))
        throw BackendError("backend error: " + reply.value("error", std::string("unknown")));
    if (!reply.contains("score")) throw BackendError("backend reply missing 'score'");
    return reply.at("score").get<int>();
}

}  // namespace

BackendTemplates BackendTemplates::load(const std::string& generator_path,
                                        const std::string& scorer_path) {
    return BackendTemplates{read_file(generator_path), read_file(scorer_path)};
}

struct SubprocessBackend::Child {
    pid_t pid = -1;
    FILE* to_child = nullptr;
    FILE* from_child = nullptr;

    ~Child() {
        if (to_child) std::fclose(to_child);
        if (from_child) std::fclose(from_child);
        if (pid > 0) {
            int status = 0;
            waitpid(pid, &status, 0);
        }
    }
};

SubprocessBackend::SubprocessBackend(std::string command,
                                     std::optional<BackendTemplates> templates)
    : command_(std::move(command)), templates_(std::move(templates)) {}

SubprocessBackend::~SubprocessBackend() = default;

void SubprocessBackend::ensure_started() {
    if (child_) return;
    int in_pipe[2], out_pipe[2];
    if (pipe(in_pipe) != 0 || pipe(out_pipe) != 0)
        throw BackendError("subprocess backend: pipe() failed");
    const pid_t pid = fork();
    if (pid < 0) throw BackendError("subprocess backend: fork() failed");
    if (pid == 0) {
        dup2(in_pipe[0], STDIN_FILENO);
        dup2(out_pipe[1], STDOUT_FILENO);
        close(in_pipe[0]);
        close(in_pipe[1]);
        close(out_pipe[0]);
        close(out_pipe[1]);
        execl("/bin/sh", "sh", "-c", command_.c_str(), static_cast<char*>(nullptr));
        _exit(127);
    }
    close(in_pipe[0]);
    close(out_pipe[1]);
    auto child = std::make_unique<Child>();
    child->pid = pid;
    child->to_child = fdopen(in_pipe[1], "w");
    child->from_child = fdopen(out_pipe[0], "r");
    if (!child->to_child || !child->from_child)
        throw BackendError("subprocess backend: fdopen() failed");
    child_ = std::move(child);
}

std::string SubprocessBackend::roundtrip(const std::string& request_line) {
    ensure_started();
    if (std::fputs(request_line.c_str(), child_->to_child) == EOF ||
        std::fputc('\n', child_->to_child) == EOF || std::fflush(child_->to_child) != 0) {
        child_.reset();
        throw BackendError("subprocess backend: write to worker failed");
    }
    std::string line;
    int c;
    while ((c = std::fgetc(child_->from_child)) != EOF && c != '\n')
        line.push_back(static_cast<char>(c));
    if (line.empty() && c == EOF) {
        child_.reset();
        throw BackendError("subprocess backend: worker closed its output");
    }
    return line;
}

std::string SubprocessBackend::generate(const Item& item, double theta, const Decoding& decoding,
                                        std::uint64_t /*cell_seed*/) {
    return expect_text(roundtrip(generate_body(item, theta, decoding, templates_).dump()));
}

int SubprocessBackend::score(const Item& item, const std::string& response_text,
                             std::uint64_t /*cell_seed*/) {
    return expect_score(roundtrip(score_body(item, response_text, templates_).dump()));
}

struct HttpBackend::Impl {
    httplib::Client client;
    explicit Impl(const std::string& url) : client(url) {
        client.set_connection_timeout(5);
        client.set_read_timeout(120);
    }
};

HttpBackend::HttpBackend(std::string base_url, std::optional<BackendTemplates> templates)
    : impl_(std::make_unique<Impl>(base_url)), templates_(std::move(templates)) {}

HttpBackend::~HttpBackend() = default;

std::string HttpBackend::generate(const Item& item, double theta, const Decoding& decoding,
                                  std::uint64_t /*cell_seed*/) {
    auto res = impl_->client.Post("/generate",
                                  generate_body(item, theta, decoding, templates_).dump(),
                                  "application/json");
    if (!res) throw BackendError("http backend: POST /generate failed");
    if (res->status != 200)
        throw BackendError("http backend: /generate status " + std::to_string(res->status));
    return expect_text(res->body);
}

int HttpBackend::score(const Item& item, const std::string& response_text,
                       std::uint64_t /*cell_seed*/) {
    auto res = impl_->client.Post("/score", score_body(item, response_text, templates_).dump(),
                                  "application/json");
    if (!res) throw BackendError("http backend: POST /score failed");
    if (res->status != 200)
        throw BackendError("http backend: /score status " + std::to_string(res->status));
    return expect_score(res->body);
}

}  // namespace psychocal::sim
