#pragma once

// Minimal RFC 4180 reader/writer. Records may span lines inside quotes; both
// LF and CRLF terminators are accepted.

#include "geomancer/error.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace geomancer::csv {

using Record = std::vector<std::string>;

struct Table {
    Record header;
    std::vector<Record> rows;
    std::vector<std::size_t> row_numbers; // 1-based data row number per row

    /// Index of `name` in the header, or npos.
    std::size_t column(std::string_view name) const
    {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (header[i] == name)
                return i;
        return npos;
    }

    static constexpr std::size_t npos = static_cast<std::size_t>(-1);
};

inline Table parse(std::string_view text)
{
    if (text.starts_with("\xEF\xBB\xBF"))
        text.remove_prefix(3);

    std::vector<Record> records;
    Record record;
    std::string field;
    bool in_quotes = false;
    bool field_started = false;
    std::size_t line = 1;

    auto end_field = [&] {
        record.push_back(std::move(field));
        field.clear();
        field_started = false;
    };
    auto end_record = [&] {
        end_field();
        records.push_back(std::move(record));
        record.clear();
    };

    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                if (c == '\n')
                    ++line;
                field += c;
            }
            continue;
        }
        switch (c) {
        case '"':
            if (field_started)
                throw Error(ErrorKind::parse, "CSV line " + std::to_string(line) + ": stray quote inside field");
            in_quotes = true;
            field_started = true;
            break;
        case ',': end_field(); break;
        case '\r':
            if (i + 1 < text.size() && text[i + 1] == '\n')
                ++i;
            [[fallthrough]];
        case '\n':
            end_record();
            ++line;
            break;
        default:
            field += c;
            field_started = true;
        }
    }
    if (in_quotes)
        throw Error(ErrorKind::parse, "CSV: unterminated quoted field at end of input");
    if (field_started || !record.empty())
        end_record();

    Table table;
    if (records.empty())
        throw Error(ErrorKind::schema, "CSV: missing header row");
    table.header = std::move(records.front());
    for (std::size_t i = 1; i < records.size(); ++i) {
        // Blank lines carry no data.
        if (records[i].size() == 1 && records[i][0].empty())
            continue;
        if (records[i].size() != table.header.size())
            throw Error(ErrorKind::schema, "CSV row " + std::to_string(i) + ": expected " +
                                               std::to_string(table.header.size()) + " fields, found " +
                                               std::to_string(records[i].size()));
        table.rows.push_back(std::move(records[i]));
        table.row_numbers.push_back(i);
    }
    return table;
}

inline void append_field(std::string& out, std::string_view field)
{
    const bool quote = field.find_first_of(",\"\r\n") != std::string_view::npos;
    if (!quote) {
        out += field;
        return;
    }
    out += '"';
    for (char c : field) {
        if (c == '"')
            out += '"';
        out += c;
    }
    out += '"';
}

inline void append_record(std::string& out, const Record& record)
{
    for (std::size_t i = 0; i < record.size(); ++i) {
        if (i)
            out += ',';
        append_field(out, record[i]);
    }
    out += '\n';
}

} // namespace geomancer::csv
