package org.apache.camel.model;

import java.util.ArrayList;
import java.util.List;

import org.apache.camel.CamelContext;
import org.apache.camel.Route;

/**
 * Represents an XML &lt;route/&gt; element
 */
public class RouteType extends ProcessorType<ProcessorType> {
    private List<Object> inputs = new ArrayList<Object>();
    private CamelContext camelContext;
    private boolean autoStartup = true;

    public RouteType() {
    }

    /**
     * Adds the routes built from this definition to the context and starts
     * them when the context is started or restarted.
     */
    public void addRoutes(CamelContext context, List<Route> routes) throws Exception {
        setCamelContext(context);
        if (autoStartup) {
            startRouteDefinitions(context, routes);
        }
    }

    protected void startRouteDefinitions(CamelContext context, List<Route> routes) throws Exception {
        for (Object input : inputs) {
            routes.add(context.createRoute(input));
        }
    }

    public void setCamelContext(CamelContext camelContext) {
        this.camelContext = camelContext;
    }

    public CamelContext getCamelContext() {
        return camelContext;
    }
}
