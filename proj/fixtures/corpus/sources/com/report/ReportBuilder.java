package com.report;

import java.util.ArrayList;
import java.util.List;

public class ReportBuilder {
    private final List<Section> sections = new ArrayList<>();
    private final Formatter formatter;
    private String title;
    private int pageWidth = 80;

    public ReportBuilder(Formatter formatter) {
        this.formatter = formatter;
    }

    public String render(List<Row> rows, boolean withTotals) {
        StringBuilder out = new StringBuilder();
        out.append(formatter.heading(title));
        out.append('\n');

        String rule = "-".repeat(pageWidth);
        out.append(rule);
        out.append('\n');

        double sum = 0;
        int count = 0;
        for (Row r : rows) {
            out.append(formatter.row(r, pageWidth));
            out.append('\n');
            sum += r.amount();
            count++;
        }
        if (withTotals) {
            String totals = formatter.totals(sum, count);
            out.append(rule).append('\n');
            out.append(totals).append('\n');
        }
        return out.toString();
    }

    public void addSection(String name, List<Row> rows) {
        Section section = new Section(name);
        section.setWidth(pageWidth);
        // drop empty and duplicate rows
        List<Row> unique = new ArrayList<>();
        for (Row r : rows) {
            if (r.isEmpty() || unique.contains(r)) {
                continue;
            }
            unique.add(r);
        }

        section.setRows(unique);
        sections.add(section);
        formatter.notifyAdded(name);
    }

    public int paginate(int linesPerPage) {
        int pages = 0;
        int used = 0;
        for (Section s : sections) {
            int need = s.rows().size() + 2;
            if (used + need > linesPerPage) {
                pages++;
                used = 0;
            }
            used += need;
        }
        if (used > 0) {
            pages++;
        }

        formatter.setPageCount(pages);
        formatter.setFooter("page count " + pages);
        return pages;
    }

    public List<String> outline() {
        List<String> lines = new ArrayList<>();
        lines.add(title);
        int index = 1;
        for (Section s : sections) {
            String entry = index + ". " + s.name();
            lines.add(entry);
            index++;
        }
        if (lines.size() > 20) {
            int hidden = lines.size() - 20;
            lines.subList(20, lines.size()).clear();
            lines.add("... " + hidden + " more");
        }
        return lines;
    }
}
