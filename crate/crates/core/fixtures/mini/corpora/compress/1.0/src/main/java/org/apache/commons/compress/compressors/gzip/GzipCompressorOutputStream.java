package org.apache.commons.compress.compressors.gzip;

import java.io.IOException;
import java.io.OutputStream;
import java.util.zip.CRC32;
import java.util.zip.Deflater;

import org.apache.commons.compress.compressors.CompressorOutputStream;

/**
 * Compressed output stream using the gzip format. This implementation improves
 * over the standard GZIPOutputStream class by allowing the configuration of
 * the compression level and the header metadata (filename, comment,
 * modification time, operating system and extra flags).
 */
public class GzipCompressorOutputStream extends CompressorOutputStream {

    private final OutputStream out;
    private final Deflater deflater;
    private final CRC32 crc = new CRC32();
    private String filename;

    public GzipCompressorOutputStream(final OutputStream out, final String filename) throws IOException {
        this.out = out;
        this.filename = filename;
        this.deflater = new Deflater(Deflater.DEFAULT_COMPRESSION, true);
        writeHeader();
    }

    /**
     * Writes the gzip header including the original file name and comment.
     */
    private void writeHeader() throws IOException {
        out.write(0x1f);
        out.write(0x8b);
        if (filename != null) {
            out.write(filename.getBytes("ISO-8859-1"));
            out.write(0);
        }
    }

    @Override
    public void write(final int b) throws IOException {
        crc.update(b);
        out.write(b);
    }
}
