// SPDX-License-Identifier: Apache-2.0

#include "skelgen/codegen.hpp"

#include <cctype>
#include <sstream>

#include "skelgen/error.hpp"

namespace skelgen::codegen {

using detect::UiClass;

std::string_view to_string(Access a) {
    switch (a) {
        case Access::Public: return "public";
        case Access::Private: return "private";
        case Access::Protected: return "protected";
    }
    return "public";
}

namespace {

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(first, last - first + 1));
}

struct MethodParts {
    std::string name;
    std::string params;
};

// '(' followed somewhere by ')'
bool has_parameter_list(std::string_view s) {
    const auto open = s.find('(');
    return open != std::string_view::npos && s.find(')', open + 1) != std::string_view::npos;
}

MethodParts split_method(std::string_view decl) {
    const auto open = decl.find('(');
    const auto close = decl.rfind(')');
    return {trim(decl.substr(0, open)), trim(decl.substr(open + 1, close - open - 1))};
}

}  // namespace

std::string sanitize_identifier(std::string_view raw) {
    std::string out;
    out.reserve(raw.size() + 1);
    for (char c : raw) {
        const auto u = static_cast<unsigned char>(c);
        out += (std::isalnum(u) && u < 0x80) || c == '_' ? c : '_';
    }
    if (out.empty()) return "_";
    if (std::isdigit(static_cast<unsigned char>(out.front()))) out.insert(out.begin(), '_');
    return out;
}

// ---- class diagrams --------------------------------------------------------

ClassModel class_generation(const std::vector<std::string>& detected_text) {
    if (detected_text.empty()) throw parse_error("no class name");
    ClassModel model;
    model.class_name = trim(detected_text.front());
    for (std::size_t i = 1; i < detected_text.size(); ++i) {
        auto element = trim(detected_text[i]);
        Access access = Access::Public;
        if (!element.empty()) {
            switch (element.front()) {
                case '-': access = Access::Private; break;
                case '/': access = Access::Protected; break;
                default: break;
            }
            if (element.front() == '-' || element.front() == '/' || element.front() == '+') {
                element = trim(std::string_view(element).substr(1));
            }
        }
        auto& list = has_parameter_list(element) ? model.class_methods : model.class_attributes;
        list.push_back({std::move(element), access});
    }
    return model;
}

std::string class_file_maker(const ClassModel& model) {
    std::ostringstream out;
    out << "class " << sanitize_identifier(model.class_name) << ":\n";
    if (model.class_attributes.empty() && model.class_methods.empty()) {
        out << "    pass\n";
        return out.str();
    }

    bool first_block = true;
    if (!model.class_attributes.empty()) {
        out << "    def __init__(self):\n";
        for (const auto& a : model.class_attributes) {
            const auto colon = a.declaration.find(':');
            const auto name = sanitize_identifier(trim(std::string_view(a.declaration).substr(0, colon)));
            out << "        self." << name << " = None";
            if (colon != std::string::npos) {
                const auto type = trim(std::string_view(a.declaration).substr(colon + 1));
                if (!type.empty()) out << "  # type: " << type;
            }
            out << "  # " << to_string(a.access) << "\n";
        }
        first_block = false;
    }
    for (const auto& m : model.class_methods) {
        if (!first_block) out << "\n";
        first_block = false;
        const auto parts = split_method(m.declaration);
        out << "    def " << sanitize_identifier(parts.name) << "(self";
        if (!parts.params.empty()) out << ", " << parts.params;
        out << "):  # " << to_string(m.access) << "\n";
        out << "        pass\n";
    }
    return out.str();
}

// ---- database tables -------------------------------------------------------

TableModel database_generation(const std::vector<std::string>& detected_text, const std::string& table_name) {
    if (trim(table_name).empty()) throw parse_error("database_generation: empty table name");
    if (detected_text.empty()) throw parse_error("database_generation: no attributes for table " + table_name);

    TableModel model;
    model.table_name = trim(table_name);
    for (const auto& element : detected_text) {
        std::istringstream in(element);
        std::vector<std::string> tokens;
        for (std::string tok; in >> tok;) tokens.push_back(tok);
        // a key marker split off by OCR ("* id int") belongs to the next token
        bool key_marker = false;
        if (!tokens.empty() && tokens.front().find_first_not_of('*') == std::string::npos) {
            key_marker = true;
            tokens.erase(tokens.begin());
        }
        if (tokens.size() < 2) {
            throw parse_error("database_generation: entry '" + element + "' needs an attribute and a data type");
        }
        auto attribute = tokens.front();
        std::string data_type = tokens[1];
        for (std::size_t i = 2; i < tokens.size(); ++i) data_type += " " + tokens[i];

        if (attribute.find('*') != std::string::npos) {
            key_marker = true;
            std::erase(attribute, '*');
            if (attribute.empty()) {
                throw parse_error("database_generation: entry '" + element + "' has an empty attribute name");
            }
        }
        if (key_marker) model.primary_keys.push_back(attribute);
        model.table_attributes.push_back({std::move(attribute), std::move(data_type)});
    }
    return model;
}

std::string create_sql_query(const TableModel& model) {
    std::string sql = "CREATE TABLE " + model.table_name + " (\n";
    for (std::size_t i = 0; i < model.table_attributes.size(); ++i) {
        const auto& c = model.table_attributes[i];
        sql += "  " + c.attribute + " " + c.data_type;
        const bool last = i + 1 == model.table_attributes.size() && model.primary_keys.empty();
        sql += last ? "\n" : ",\n";
    }
    if (!model.primary_keys.empty()) {
        sql += "  PRIMARY KEY (";
        for (std::size_t i = 0; i < model.primary_keys.size(); ++i) {
            if (i != 0) sql += ", ";
            sql += model.primary_keys[i];
        }
        sql += ")\n";
    }
    sql += ");\n";
    return sql;
}

// ---- HTML ------------------------------------------------------------------

std::string html_escape(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            case '\'': out += "&#39;"; break;
            default: out += c;
        }
    }
    return out;
}

namespace {

std::string js_string_body(std::string_view s) {
    std::string out;
    for (char c : s) {
        if (c == '\\' || c == '\'') out += '\\';
        out += c;
    }
    return out;
}

struct LinkAttrs {
    std::string href;     // for anchors
    std::string onclick;  // for everything else
};

LinkAttrs link_attrs(const std::optional<std::string>& target) {
    LinkAttrs a;
    if (!target) return a;
    if (target->rfind("js:", 0) == 0) {
        a.onclick = " onclick=\"" + sanitize_identifier(trim(target->substr(3))) + "()\"";
        return a;
    }
    const auto page = html_escape(*target + ".html");
    a.href = page;
    a.onclick = " onclick=\"location.href='" + html_escape(js_string_body(*target + ".html")) + "'\"";
    return a;
}

std::string render_element(const ir::PageElement& e) {
    const auto text = e.text ? html_escape(*e.text) : std::string();
    const auto link = link_attrs(e.link_target);
    const bool is_script = e.link_target && e.link_target->rfind("js:", 0) == 0;
    switch (e.cls) {
        case UiClass::Paragraph: return "<p" + link.onclick + ">" + text + "</p>";
        case UiClass::Image: return "<img alt=\"" + text + "\"" + link.onclick + ">";
        case UiClass::Input:
            return "<input type=\"text\"" + (e.text ? " placeholder=\"" + text + "\"" : std::string()) + link.onclick + ">";
        case UiClass::Button: return "<button" + link.onclick + ">" + text + "</button>";
        case UiClass::Hyperlink:
            if (is_script) return "<a href=\"#\"" + link.onclick + ">" + text + "</a>";
            return "<a href=\"" + (link.href.empty() ? std::string("#") : link.href) + "\">" + text + "</a>";
        case UiClass::Select:
            return "<select" + link.onclick + ">" + (e.text ? "<option>" + text + "</option>" : std::string()) + "</select>";
        case UiClass::Table:
            return "<table" + link.onclick + ">" + (e.text ? "<caption>" + text + "</caption>" : std::string()) + "</table>";
        case UiClass::Navbar: return "<nav" + link.onclick + ">" + text + "</nav>";
        case UiClass::Checkbox: return "<input type=\"checkbox\"" + link.onclick + "><label>" + text + "</label>";
        case UiClass::Radio: return "<input type=\"radio\"" + link.onclick + "><label>" + text + "</label>";
        case UiClass::Linker: return {};
    }
    return {};
}

}  // namespace

std::string html_generate(const ir::PageIr& page) {
    std::string out;
    out += "<!DOCTYPE html>\n";
    out += "<html>\n";
    out += "<head>\n";
    out += "  <meta charset=\"utf-8\">\n";
    out += "  <title>" + html_escape(page.image_id) + "</title>\n";
    out += "</head>\n";
    out += "<body>\n";
    for (const auto& row : page.rows) {
        out += "  <div class=\"row\">\n";
        for (int idx : row) {
            const auto& e = page.elements.at(static_cast<std::size_t>(idx));
            if (e.cls == UiClass::Linker) continue;
            out += "    " + render_element(e) + "\n";
        }
        out += "  </div>\n";
    }
    out += "</body>\n";
    out += "</html>\n";
    return out;
}

}  // namespace skelgen::codegen
