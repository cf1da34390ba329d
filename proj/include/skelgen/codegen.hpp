// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "skelgen/ui_ir.hpp"

namespace skelgen::codegen {

enum class Access { Public, Private, Protected };

std::string_view to_string(Access a);

struct Member {
    std::string declaration;  // modifier symbol stripped, trimmed
    Access access = Access::Public;

    bool operator==(const Member&) const = default;
};

struct ClassModel {
    std::string class_name;
    std::vector<Member> class_attributes;
    std::vector<Member> class_methods;

    bool operator==(const ClassModel&) const = default;
};

/// First entry names the class. Each later entry is classified by its leading
/// symbol ('-' private, '/' protected, '+' or none public) and sorted into
/// methods when it carries a parenthesised parameter list.
ClassModel class_generation(const std::vector<std::string>& detected_text);

/// Python-style class skeleton.
std::string class_file_maker(const ClassModel& model);

/// Characters outside [A-Za-z0-9_] become '_'; a leading digit gets a '_'
/// prefix; an empty result becomes "_".
std::string sanitize_identifier(std::string_view raw);

struct Column {
    std::string attribute;
    std::string data_type;

    bool operator==(const Column&) const = default;
};

struct TableModel {
    std::string table_name;
    std::vector<Column> table_attributes;
    std::vector<std::string> primary_keys;

    bool operator==(const TableModel&) const = default;
};

/// One "<attribute> <type...>" entry per column; '*' marks a key column.
TableModel database_generation(const std::vector<std::string>& detected_text, const std::string& table_name);

std::string create_sql_query(const TableModel& model);

std::string html_escape(std::string_view s);
std::string html_generate(const ir::PageIr& page);

}  // namespace skelgen::codegen
