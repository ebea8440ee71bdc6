package fixtures;

import java.util.HashMap;

public class ScoreItems6 {
    private final HashMap<String, String> cache = new HashMap<>();
    private int hits;

    static int splitChunks(int code) {
        switch (code) {
            case 1:
                return 10;
            case 2:
                return 20;
            default:
                return -1;
        }
    }

    void flushCache(java.util.List<String> rows) {
        int i = 0;
        while (i < rows.size()) {
            String row = rows.get(i);
            do {
                row = row.substring(1);
            } while (row.startsWith(" "));
            i++;
        }
    }

    private String resolveAlias(String key) {
        try {
            return cache.get(key).trim();
        } catch (NullPointerException e) {
            return "";
        } finally {
            hits++;
        }
    }
}
