#include "origin/corpus.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <fstream>
#include <mutex>
#include <set>
#include <thread>

#include <json.hpp>

#include "origin/errors.hpp"
#include "origin/provider.hpp"
#include "origin/util.hpp"

namespace origin {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string to_lower(std::string word) {
    std::transform(word.begin(), word.end(), word.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return word;
}

size_t placeholder_count(std::string_view tmpl) {
    size_t count = 0;
    for (size_t i = 0; i + 1 < tmpl.size(); ++i) {
        if (tmpl[i] == '{' && tmpl[i + 1] == '}') {
            ++count;
            ++i;
        }
    }
    return count;
}

json load_json_file(const fs::path& path) {
    std::ifstream in(path);
    if (!in) raise(Errc::SchemaViolation, "missing " + path.string());
    json parsed = json::parse(in, nullptr, false);
    if (parsed.is_discarded())
        raise(Errc::SchemaViolation, "malformed JSON in " + path.string());
    return parsed;
}

} // namespace

size_t PromptSpace::size() const {
    size_t product = slots.empty() ? 0 : 1;
    for (const auto& slot : slots) product *= slot.size();
    return product;
}

PromptSpace build_prompt_space(std::vector<std::vector<std::string>> slots,
                               std::string template_text) {
    if (slots.empty()) raise(Errc::EmptySlot, "prompt space needs at least one slot");

    PromptSpace space;
    for (size_t s = 0; s < slots.size(); ++s) {
        std::set<std::string> words;
        for (auto& word : slots[s]) {
            std::string lowered = to_lower(std::move(word));
            if (!lowered.empty()) words.insert(std::move(lowered));
        }
        if (words.empty())
            raise(Errc::EmptySlot, "slot " + std::to_string(s) + " is empty");
        space.slots.emplace_back(words.begin(), words.end());
    }

    size_t placeholders = placeholder_count(template_text);
    if (placeholders != space.slots.size())
        raise(Errc::TemplateArityMismatch,
              "template has " + std::to_string(placeholders) + " placeholders for " +
                  std::to_string(space.slots.size()) + " slots");
    space.template_text = std::move(template_text);
    return space;
}

PromptSpec render_prompt(const PromptSpace& space, size_t id) {
    const size_t total = space.size();
    if (id >= total)
        raise(Errc::IdOutOfRange,
              "prompt id " + std::to_string(id) + " outside space of size " + std::to_string(total));

    // Mixed-radix decode, last slot varying fastest.
    std::vector<size_t> indices(space.slots.size(), 0);
    size_t rest = id;
    for (size_t s = space.slots.size(); s-- > 0;) {
        indices[s] = rest % space.slots[s].size();
        rest /= space.slots[s].size();
    }

    PromptSpec spec;
    spec.id = id;
    for (size_t s = 0; s < space.slots.size(); ++s)
        spec.words.push_back(space.slots[s][indices[s]]);

    std::string out;
    size_t word_index = 0;
    const std::string& tmpl = space.template_text;
    for (size_t i = 0; i < tmpl.size();) {
        if (i + 1 < tmpl.size() && tmpl[i] == '{' && tmpl[i + 1] == '}') {
            out += spec.words[word_index++];
            i += 2;
        } else {
            out += tmpl[i++];
        }
    }
    spec.rendered = std::move(out);
    spec.length_tokens = token_count(spec.rendered);
    return spec;
}

size_t prompt_id_of(const PromptSpace& space, const std::vector<std::string>& words) {
    if (words.size() != space.slots.size())
        raise(Errc::InvalidArgument, "word tuple arity mismatch");
    size_t id = 0;
    for (size_t s = 0; s < space.slots.size(); ++s) {
        const auto& slot = space.slots[s];
        auto it = std::lower_bound(slot.begin(), slot.end(), words[s]);
        if (it == slot.end() || *it != words[s])
            raise(Errc::InvalidArgument, "word not in slot " + std::to_string(s) + ": " + words[s]);
        id = id * slot.size() + static_cast<size_t>(it - slot.begin());
    }
    return id;
}

const AnswerRecord* Repository::find(AnswerKey key) const {
    auto it = answers.find(key);
    return it == answers.end() ? nullptr : &it->second;
}

uint32_t Repository::variants_of(uint32_t prompt_id) const {
    uint32_t count = 0;
    for (auto it = answers.lower_bound(AnswerKey{prompt_id, 0});
         it != answers.end() && it->first.prompt_id == prompt_id; ++it)
        ++count;
    return count;
}

IngestReport ingest(const PromptSpace& space, AnswerProvider& provider,
                    uint32_t variants, unsigned max_in_flight) {
    if (variants < 1) raise(Errc::InvalidArgument, "variants must be >= 1");

    const size_t prompt_count = space.size();
    std::vector<PromptSpec> prompts;
    prompts.reserve(prompt_count);
    for (size_t id = 0; id < prompt_count; ++id)
        prompts.push_back(render_prompt(space, id));

    struct Slot {
        AnswerKey key;
        std::string text;
        bool ok = false;
    };
    std::vector<Slot> slots(prompt_count * variants);
    for (size_t id = 0; id < prompt_count; ++id)
        for (uint32_t v = 0; v < variants; ++v)
            slots[id * variants + v].key = {static_cast<uint32_t>(id), v};

    const std::string fetched_at = iso_timestamp();
    std::atomic<size_t> next{0};
    unsigned workers = std::max(1u, std::min<unsigned>(max_in_flight, std::thread::hardware_concurrency()));

    auto worker = [&] {
        for (;;) {
            size_t i = next.fetch_add(1);
            if (i >= slots.size()) return;
            Slot& slot = slots[i];
            try {
                slot.text = provider.fetch(prompts[slot.key.prompt_id], slot.key.variant);
                slot.ok = !slot.text.empty();
            } catch (const Error&) {
                slot.ok = false;
            }
        }
    };

    if (workers > 1) {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    } else {
        worker();
    }

    IngestReport report;
    report.repo.space = space;
    report.repo.provenance = "ingest provider=" + provider.id() + " variants=" +
                             std::to_string(variants) + " at=" + fetched_at;
    for (Slot& slot : slots) {
        if (!slot.ok) {
            report.missing.push_back(slot.key);
            continue;
        }
        AnswerRecord record;
        record.prompt_id = slot.key.prompt_id;
        record.variant = slot.key.variant;
        record.text = std::move(slot.text);
        record.tokens = tokenize(record.text);
        record.provider_id = provider.id();
        record.fetched_at = fetched_at;
        report.repo.answers.emplace(slot.key, std::move(record));
    }

    if (!slots.empty() && report.repo.answers.empty())
        raise(Errc::ProviderUnavailable, "no records fetched from provider " + provider.id());
    return report;
}

Repository retokenized(const Repository& repo, const NormalizationProfile& profile) {
    Repository out;
    out.space = repo.space;
    out.provenance = repo.provenance;
    for (const auto& [key, record] : repo.answers) {
        AnswerRecord copy = record;
        copy.tokens = tokenize(copy.text, profile);
        out.answers.emplace(key, std::move(copy));
    }
    return out;
}

void save_prompt_space(const PromptSpace& space, const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) raise(Errc::IoFailure, "cannot create " + dir.string());

    json doc;
    doc["slots"] = space.slots;
    doc["template"] = space.template_text;
    write_file((dir / "space.json").string(), doc.dump(2) + "\n");
}

PromptSpace load_prompt_space(const fs::path& dir) {
    json doc = load_json_file(dir / "space.json");
    if (!doc.is_object() || !doc.contains("slots") || !doc.contains("template") ||
        !doc["slots"].is_array() || !doc["template"].is_string())
        raise(Errc::SchemaViolation, "space.json must be {\"slots\": [[...]], \"template\": \"...\"}");

    std::vector<std::vector<std::string>> slots;
    for (const auto& slot : doc["slots"]) {
        if (!slot.is_array())
            raise(Errc::SchemaViolation, "space.json slot entries must be arrays");
        std::vector<std::string> words;
        for (const auto& word : slot) {
            if (!word.is_string())
                raise(Errc::SchemaViolation, "space.json slot words must be strings");
            words.push_back(word.get<std::string>());
        }
        slots.push_back(std::move(words));
    }
    return build_prompt_space(std::move(slots), doc["template"].get<std::string>());
}

void save_repository(const Repository& repo, const fs::path& dir) {
    save_prompt_space(repo.space, dir);

    std::error_code ec;
    // Stale files from a previous ingest would corrupt the variant layout.
    fs::remove_all(dir / "answers", ec);
    for (uint32_t id = 0; id < repo.space.size(); ++id) {
        auto begin = repo.answers.lower_bound(AnswerKey{id, 0});
        if (begin == repo.answers.end() || begin->first.prompt_id != id) continue;

        fs::path prompt_dir = dir / "answers" / std::to_string(id);
        fs::create_directories(prompt_dir, ec);
        if (ec) raise(Errc::IoFailure, "cannot create " + prompt_dir.string());

        json meta = json::object();
        for (auto it = begin; it != repo.answers.end() && it->first.prompt_id == id; ++it) {
            const AnswerRecord& record = it->second;
            write_file((prompt_dir / (std::to_string(record.variant) + ".txt")).string(), record.text);
            meta[std::to_string(record.variant)] = {
                {"provider_id", record.provider_id},
                {"fetched_at", record.fetched_at},
            };
        }
        write_file((prompt_dir / "meta.json").string(), meta.dump(2) + "\n");
    }
}

Repository load_repository(const fs::path& dir) {
    Repository repo;
    repo.space = load_prompt_space(dir);
    repo.provenance = "loaded from " + dir.string();

    fs::path answers_dir = dir / "answers";
    if (!fs::exists(answers_dir)) return repo;

    const size_t space_size = repo.space.size();
    std::vector<uint32_t> prompt_ids;
    for (const auto& entry : fs::directory_iterator(answers_dir)) {
        if (!entry.is_directory()) continue;
        const std::string name = entry.path().filename().string();
        if (name.empty() || name.size() > 9 ||
            !std::all_of(name.begin(), name.end(),
                         [](unsigned char c) { return std::isdigit(c); }))
            raise(Errc::SchemaViolation, "unexpected entry answers/" + name);
        uint32_t id = static_cast<uint32_t>(std::stoul(name));
        if (id >= space_size)
            raise(Errc::SchemaViolation,
                  "answers/" + name + " outside prompt space of size " + std::to_string(space_size));
        prompt_ids.push_back(id);
    }
    std::sort(prompt_ids.begin(), prompt_ids.end());

    for (uint32_t id : prompt_ids) {
        fs::path prompt_dir = answers_dir / std::to_string(id);
        json meta = load_json_file(prompt_dir / "meta.json");
        if (!meta.is_object())
            raise(Errc::SchemaViolation, "answers/" + std::to_string(id) + "/meta.json must be an object");

        std::set<uint32_t> variants;
        for (const auto& entry : fs::directory_iterator(prompt_dir)) {
            const std::string name = entry.path().filename().string();
            if (name == "meta.json") continue;
            const std::string stem = name.size() > 4 ? name.substr(0, name.size() - 4) : "";
            if (name.size() < 5 || name.substr(name.size() - 4) != ".txt" || stem.size() > 9 ||
                !std::all_of(stem.begin(), stem.end(),
                             [](unsigned char c) { return std::isdigit(c); }))
                raise(Errc::SchemaViolation, "unexpected file answers/" + std::to_string(id) + "/" + name);
            variants.insert(static_cast<uint32_t>(std::stoul(stem)));
        }

        uint32_t expected = 0;
        for (uint32_t v : variants) {
            if (v != expected)
                raise(Errc::SchemaViolation,
                      "answers/" + std::to_string(id) + " missing variant " + std::to_string(expected) +
                          " (variants must be contiguous from 0)");
            ++expected;
        }

        for (uint32_t v : variants) {
            AnswerRecord record;
            record.prompt_id = id;
            record.variant = v;
            record.text = read_file((prompt_dir / (std::to_string(v) + ".txt")).string());
            if (record.text.empty())
                raise(Errc::SchemaViolation,
                      "answers/" + std::to_string(id) + "/" + std::to_string(v) + ".txt is empty");
            record.tokens = tokenize(record.text);
            const std::string key = std::to_string(v);
            if (meta.contains(key) && meta[key].is_object()) {
                record.provider_id = meta[key].value("provider_id", "");
                record.fetched_at = meta[key].value("fetched_at", "");
            } else {
                raise(Errc::SchemaViolation,
                      "answers/" + std::to_string(id) + "/meta.json missing entry for variant " + key);
            }
            repo.answers.emplace(AnswerKey{id, v}, std::move(record));
        }
    }
    return repo;
}

} // namespace origin
