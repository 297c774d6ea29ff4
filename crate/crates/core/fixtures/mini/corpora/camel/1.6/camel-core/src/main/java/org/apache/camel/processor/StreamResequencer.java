package org.apache.camel.processor;

import java.util.List;

import org.apache.camel.Exchange;
import org.apache.camel.Processor;

/**
 * A resequencer that re-orders a (continuous) stream of exchanges. The
 * algorithm is based on the detection of gaps in a message stream rather than
 * on a fixed batch size.
 */
public class StreamResequencer implements Processor {

    private final Processor processor;
    private long timeout;
    private int capacity;

    public StreamResequencer(Processor processor, List<Object> expressions) {
        this.processor = processor;
    }

    public void setTimeout(long timeout) {
        this.timeout = timeout;
    }

    public void setCapacity(int capacity) {
        this.capacity = capacity;
    }

    /**
     * Delivers the next in-sequence exchange.
     */
    public void process(Exchange exchange) throws Exception {
        processor.process(exchange);
    }
}
