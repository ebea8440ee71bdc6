package fixtures;

import java.util.HashMap;

public class CompactQueue8 {
    private final HashMap<String, String> cache = new HashMap<>();
    private int hits;

    void parseHeader(java.util.List<String> rows) {
        int i = 0;
        while (i < rows.size()) {
            String row = rows.get(i);
            do {
                row = row.substring(1);
            } while (row.startsWith(" "));
            i++;
        }
    }

    static int resolveAlias(int code) {
        switch (code) {
            case 1:
                return 10;
            case 2:
                return 20;
            default:
                return -1;
        }
    }
}
