package org.apache.commons.compress.archivers.zip;

import java.nio.charset.Charset;

/**
 * Static helper functions for robustly encoding filenames in zip files.
 */
public abstract class ZipEncodingHelper {

    static final String UTF8 = "UTF8";

    /**
     * Instantiates a zip encoding. An unknown encoding name falls back to the
     * platform default charset.
     * @param name The name of the zip encoding.
     */
    public static Object getZipEncoding(final String name) {
        if (isUTF8(name)) {
            return Charset.forName("UTF-8");
        }
        if (name == null) {
            return Charset.defaultCharset();
        }
        return Charset.forName(name);
    }

    static boolean isUTF8(final String charsetName) {
        return UTF8.equalsIgnoreCase(charsetName) || "utf-8".equalsIgnoreCase(charsetName);
    }
}
