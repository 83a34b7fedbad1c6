// SPDX-License-Identifier: Apache-2.0
#include "mnemo/pipeline/prompts.hpp"

#include "mnemo/core/error.hpp"

#include <fstream>
#include <map>
#include <sstream>

namespace mnemo {
namespace detail {
const std::map<std::string, std::string>& embedded_prompts();
}

namespace {

constexpr std::string_view kPromptVersion = "mnemo-prompts/1";

void override_from(const std::filesystem::path& directory, std::string_view stem, std::string& target) {
    const auto path = directory / (std::string(stem) + ".txt");
    if (!std::filesystem::exists(path)) return;
    std::ifstream in(path, std::ios::binary);
    require(in.good(), ErrorCode::io, "cannot read prompt template " + path.string());
    std::ostringstream content;
    content << in.rdbuf();
    target = content.str();
}

}  // namespace

const std::string& embedded_asset(std::string_view name) {
    const auto& prompts = detail::embedded_prompts();
    auto it = prompts.find(std::string(name));
    require(it != prompts.end(), ErrorCode::not_found, "no embedded prompt asset '" + std::string(name) + "'");
    return it->second;
}

PromptTemplates PromptTemplates::defaults() {
    PromptTemplates t;
    t.version = kPromptVersion;
    t.extraction = embedded_asset("extraction");
    t.update = embedded_asset("update");
    t.summary = embedded_asset("summary");
    t.entities = embedded_asset("entities");
    t.relations = embedded_asset("relations");
    t.resolver = embedded_asset("resolver");
    return t;
}

PromptTemplates PromptTemplates::load(const std::filesystem::path& directory) {
    require(std::filesystem::is_directory(directory), ErrorCode::not_found,
            "prompt template directory " + directory.string() + " does not exist");
    auto t = defaults();
    override_from(directory, "extraction", t.extraction);
    override_from(directory, "update", t.update);
    override_from(directory, "summary", t.summary);
    override_from(directory, "entities", t.entities);
    override_from(directory, "relations", t.relations);
    override_from(directory, "resolver", t.resolver);
    std::string version;
    override_from(directory, "VERSION", version);
    if (!version.empty()) {
        while (!version.empty() && (version.back() == '\n' || version.back() == '\r')) version.pop_back();
        t.version = version;
    }
    return t;
}

std::string render_template(std::string_view tmpl, const TemplateValues& values) {
    std::string out;
    out.reserve(tmpl.size());
    std::size_t pos = 0;
    while (pos < tmpl.size()) {
        const auto open = tmpl.find('{', pos);
        if (open == std::string_view::npos) {
            out.append(tmpl.substr(pos));
            break;
        }
        out.append(tmpl.substr(pos, open - pos));
        const auto close = tmpl.find('}', open + 1);
        if (close == std::string_view::npos) {
            out.append(tmpl.substr(open));
            break;
        }
        const auto name = tmpl.substr(open + 1, close - open - 1);
        const std::string_view* value = nullptr;
        for (const auto& [key, replacement] : values) {
            if (key == name) {
                value = &replacement;
                break;
            }
        }
        if (value != nullptr) {
            out.append(*value);
            pos = close + 1;
        } else {
            out.push_back('{');
            pos = open + 1;
        }
    }
    return out;
}

}  // namespace mnemo
