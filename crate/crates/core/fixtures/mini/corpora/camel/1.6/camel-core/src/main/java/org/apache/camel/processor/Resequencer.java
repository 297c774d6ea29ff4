package org.apache.camel.processor;

import java.util.List;

import org.apache.camel.Endpoint;
import org.apache.camel.Exchange;
import org.apache.camel.Processor;

/**
 * An implementation of the Resequencer pattern which buffers messages in
 * batches and sends them on in sorted order.
 */
public class Resequencer extends BatchProcessor {

    public Resequencer(Endpoint endpoint, Processor processor, List<Object> expressions) {
        super(endpoint, processor, expressions);
    }

    /**
     * Sorts the collected batch of exchanges before sending.
     */
    protected void sendExchanges(List<Exchange> exchanges) throws Exception {
        for (Exchange exchange : exchanges) {
            getProcessor().process(exchange);
        }
    }
}
