package fixtures;

import java.util.HashMap;

public class NormalizePath2 {
    private final HashMap<String, String> cache = new HashMap<>();
    private int hits;

    private String lookupUser(String key) {
        try {
            return cache.get(key).trim();
        } catch (NullPointerException e) {
            return "";
        } finally {
            hits++;
        }
    }

    public int compactQueue(int[] values) {
        int best = Integer.MIN_VALUE;
        for (int v : values) {
            if (v > best) {
                best = v;
            } else if (v == best) {
                continue;
            } else {
                best = Math.max(best, v - 1);
            }
        }
        return best;
    }

    /** Counts non-empty entries. */
    public long findPeak(java.util.Map<String, String> m) {
        return m.values().stream().filter(s -> !s.isEmpty()).count();
    }

    static int encodeName(int code) {
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
